#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "schedkl/schedule.hpp"

using namespace schedkl;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<NoiseSchedule> all_families() {
    return {NoiseSchedule::vp_cosine(),      NoiseSchedule::ve_geometric(),
            NoiseSchedule::tangent(0.3),     NoiseSchedule::tangent(2.5, 80.0),
            NoiseSchedule::ddpm_linear(),    NoiseSchedule::flow_linear()};
}

double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("endpoint values are exact") {
    double a = -1.0, s = -1.0;

    NoiseSchedule::vp_cosine().values(0.0, &a, &s);
    CHECK(a == 1.0);
    CHECK(s == 0.0);
    NoiseSchedule::vp_cosine().values(1.0, &a, &s);
    CHECK(a == 0.0);
    CHECK(s == 1.0);

    NoiseSchedule::flow_linear().values(0.0, &a, &s);
    CHECK(a == 1.0);
    CHECK(s == 0.0);
    NoiseSchedule::flow_linear().values(1.0, &a, &s);
    CHECK(a == 0.0);
    CHECK(s == 1.0);

    NoiseSchedule::tangent(3.7).values(1.0, &a, &s);
    CHECK(a == 0.0);
    CHECK(s == 1.0);
    NoiseSchedule::tangent(3.7).values(0.0, &a, &s);
    CHECK(a == 1.0);
    CHECK(s == 0.0);

    NoiseSchedule::ve_geometric().values(0.0, &a, &s);
    CHECK(a == 1.0);
    CHECK(s == 0.01);
    NoiseSchedule::ve_geometric().values(1.0, &a, &s);
    CHECK(a == 1.0);
    CHECK(s == 80.0);

    NoiseSchedule::ddpm_linear().values(0.0, &a, &s);
    CHECK(a == 1.0);
    CHECK(s == 0.0);
}

TEST_CASE("eval rejects out-of-domain arguments") {
    CHECK_THROWS_AS(NoiseSchedule::vp_cosine().eval(-0.1), std::domain_error);
    CHECK_THROWS_AS(NoiseSchedule::vp_cosine().eval(1.1), std::domain_error);
    // The unbounded-eta boundary is the single interior refusal.
    CHECK_THROWS_AS(NoiseSchedule::tangent(2.0).eval(1.0), std::domain_error);
    CHECK_NOTHROW(NoiseSchedule::tangent(2.0, 80.0).eval(1.0));
    CHECK_NOTHROW(NoiseSchedule::vp_cosine().eval(1.0));
}

TEST_CASE("tangent finite-boundary terminal ratio") {
    const SchedulePoint p = NoiseSchedule::tangent(2.0, 80.0).eval(1.0);
    CHECK(p.sigma / p.alpha == doctest::Approx(80.0).epsilon(1e-12));
}

TEST_CASE("first derivatives match finite differences") {
    std::mt19937_64 rng(7);
    for (const NoiseSchedule& schedule : all_families()) {
        for (int i = 0; i < 1000; ++i) {
            const double t = 0.05 + 0.90 * uniform01(rng);
            const double h = 1e-6;
            const SchedulePoint lo = schedule.eval(t - h);
            const SchedulePoint hi = schedule.eval(t + h);
            const SchedulePoint mid = schedule.eval(t);
            CHECK((hi.alpha - lo.alpha) / (2 * h) ==
                  doctest::Approx(mid.alpha_dot).epsilon(1e-6));
            CHECK((hi.sigma - lo.sigma) / (2 * h) ==
                  doctest::Approx(mid.sigma_dot).epsilon(1e-6));
        }
    }
}

TEST_CASE("second derivatives match finite differences") {
    std::mt19937_64 rng(11);
    for (const NoiseSchedule& schedule : all_families()) {
        for (int i = 0; i < 1000; ++i) {
            const double t = 0.05 + 0.90 * uniform01(rng);
            const double h = 1e-4;
            const SchedulePoint lo = schedule.eval(t - h);
            const SchedulePoint hi = schedule.eval(t + h);
            const SchedulePoint mid = schedule.eval(t);
            CHECK((hi.alpha - 2 * mid.alpha + lo.alpha) / (h * h) ==
                  doctest::Approx(mid.alpha_ddot).epsilon(1e-4));
            CHECK((hi.sigma - 2 * mid.sigma + lo.sigma) / (h * h) ==
                  doctest::Approx(mid.sigma_ddot).epsilon(1e-4));
        }
    }
}

TEST_CASE("variance-preserving identity alpha^2 + sigma^2 = 1") {
    std::mt19937_64 rng(13);
    const std::vector<NoiseSchedule> vp = {
        NoiseSchedule::vp_cosine(),       NoiseSchedule::tangent(1e-4),
        NoiseSchedule::tangent(0.2),      NoiseSchedule::tangent(1.0),
        NoiseSchedule::tangent(42.0),     NoiseSchedule::tangent(1e5),
        NoiseSchedule::tangent(3.0, 5.0), NoiseSchedule::ddpm_linear()};
    for (const NoiseSchedule& schedule : vp) {
        for (int i = 0; i < 200; ++i) {
            const double t = uniform01(rng);
            double a = 0.0, s = 0.0;
            schedule.values(t, &a, &s);
            CHECK(a * a + s * s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("tangent with unit coefficient matches the cosine family") {
    const NoiseSchedule tan1 = NoiseSchedule::tangent(1.0);
    const NoiseSchedule cosine = NoiseSchedule::vp_cosine();
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.82, 0.99, 1.0}) {
        double at = 0.0, st = 0.0, ac = 0.0, sc = 0.0;
        tan1.values(t, &at, &st);
        cosine.values(t, &ac, &sc);
        CHECK(at == doctest::Approx(ac).epsilon(1e-14));
        CHECK(st == doctest::Approx(sc).epsilon(1e-14));
    }
}

TEST_CASE("ddpm endpoint derivative structure") {
    const SchedulePoint p = NoiseSchedule::ddpm_linear().eval(0.0);
    CHECK(p.sigma == 0.0);
    CHECK(p.alpha == 1.0);
    CHECK(p.alpha_dot == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(std::isinf(p.sigma_dot));
    CHECK(p.sigma_dot > 0.0);
    CHECK(std::isinf(p.sigma_ddot));
    CHECK(p.sigma_ddot < 0.0);
}

TEST_CASE("half_logsnr is strictly decreasing and inverts") {
    for (const NoiseSchedule& schedule : all_families()) {
        const double t_min = schedule.t_min();
        const double t_max = schedule.t_max();
        double prev = schedule.half_logsnr(t_min);
        for (int i = 1; i <= 64; ++i) {
            const double t = t_min + (t_max - t_min) * i / 64.0;
            const double lam = schedule.half_logsnr(t);
            CHECK(lam < prev);
            prev = lam;
            CHECK(std::fabs(schedule.invert_lambda(lam) - t) <= 1e-9);
        }
    }
}

TEST_CASE("invert_lambda round-trip to 1e-9") {
    std::mt19937_64 rng(17);
    for (const NoiseSchedule& schedule : all_families()) {
        for (int i = 0; i < 100; ++i) {
            const double t = schedule.t_min() +
                             (schedule.t_max() - schedule.t_min()) * uniform01(rng);
            const double back = schedule.invert_lambda(schedule.half_logsnr(t));
            CHECK(std::fabs(back - t) <= 1e-9);
        }
        CHECK_THROWS_AS(schedule.invert_lambda(schedule.lambda_max() + 1.0),
                        std::out_of_range);
        CHECK_THROWS_AS(schedule.invert_lambda(schedule.lambda_min() - 1.0),
                        std::out_of_range);
    }
}

TEST_CASE("cosine half_logsnr closed-form midpoint") {
    CHECK(std::fabs(NoiseSchedule::vp_cosine().half_logsnr(0.5)) <= 1e-15);
    CHECK(NoiseSchedule::vp_cosine().invert_lambda(0.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("family names and default grid bounds") {
    CHECK(NoiseSchedule::vp_cosine().name() == "cosine");
    CHECK(NoiseSchedule::ve_geometric().name() == "ve");
    CHECK(NoiseSchedule::tangent(2.0).name() == "tangent");
    CHECK(NoiseSchedule::ddpm_linear().name() == "ddpm");
    CHECK(NoiseSchedule::flow_linear().name() == "flow");

    CHECK(NoiseSchedule::vp_cosine().default_t_lo() == 1e-3);
    CHECK(NoiseSchedule::vp_cosine().default_t_hi() == 1.0 - 1e-3);
    CHECK(NoiseSchedule::ve_geometric().default_t_lo() == 0.0);
    CHECK(NoiseSchedule::ve_geometric().default_t_hi() == 1.0);
}

TEST_CASE("factories validate parameters") {
    CHECK_THROWS_AS(NoiseSchedule::tangent(0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::tangent(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::tangent(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::tangent(1.0, -3.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::ve_geometric(0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::ve_geometric(-1.0, 80.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::ddpm_linear(0.0, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::ddpm_linear(5.0, 1.0), std::invalid_argument);
}

TEST_CASE("noise-to-signal ratio is strictly increasing") {
    for (const NoiseSchedule& schedule : all_families()) {
        double prev = -1.0;
        for (int i = 1; i < 100; ++i) {
            const double t = i / 100.0;
            double a = 0.0, s = 0.0;
            schedule.values(t, &a, &s);
            const double eta = s / a;
            CHECK(eta > prev);
            prev = eta;
        }
    }
}

TEST_CASE("tangent stable form at extreme coefficients") {
    for (double gamma : {1e-8, 1e8}) {
        const NoiseSchedule schedule = NoiseSchedule::tangent(gamma);
        for (double t : {1e-9, 0.5, 1.0 - 1e-9}) {
            double a = 0.0, s = 0.0;
            schedule.values(t, &a, &s);
            CHECK(std::isfinite(a));
            CHECK(std::isfinite(s));
            CHECK(a * a + s * s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("cosine quarter-turn gain identity") {
    // alpha(1/2) = sigma(1/2) = sqrt(2)/2.
    const SchedulePoint p = NoiseSchedule::vp_cosine().eval(0.5);
    CHECK(p.alpha == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(p.sigma == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(p.alpha_dot == doctest::Approx(-kPi / 2 * std::sqrt(0.5)).epsilon(1e-14));
}
