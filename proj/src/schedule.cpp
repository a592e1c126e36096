#include "schedkl/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace schedkl {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;
constexpr double kClip = 1e-5;  // interior clamp for lambda-based operations

void check_unit_interval(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::domain_error("schedule: t=" + std::to_string(t) + " outside [0,1]");
    }
}

}  // namespace

NoiseSchedule NoiseSchedule::vp_cosine() {
    NoiseSchedule s;
    s.family_ = Family::VpCosine;
    return s;
}

NoiseSchedule NoiseSchedule::ve_geometric(double sigma_min, double sigma_max) {
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min)) {
        throw std::invalid_argument("ve_geometric: need 0 < sigma_min < sigma_max");
    }
    NoiseSchedule s;
    s.family_ = Family::VeGeometric;
    s.sigma_min_ = sigma_min;
    s.sigma_max_ = sigma_max;
    return s;
}

NoiseSchedule NoiseSchedule::tangent(double gamma, double eta1) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("tangent: gamma must be positive");
    }
    if (!(eta1 > 0.0)) {  // also rejects NaN; +inf passes
        throw std::invalid_argument("tangent: eta1 must be in (0, +inf]");
    }
    NoiseSchedule s;
    s.family_ = Family::TangentLaw;
    s.gamma_ = gamma;
    s.eta1_ = eta1;
    s.theta_ = std::isinf(eta1) ? kHalfPi : std::atan(eta1 / std::sqrt(gamma));
    return s;
}

NoiseSchedule NoiseSchedule::ddpm_linear(double beta0, double beta1) {
    if (!(beta0 > 0.0) || !(beta1 >= beta0)) {
        throw std::invalid_argument("ddpm_linear: need 0 < beta0 <= beta1");
    }
    NoiseSchedule s;
    s.family_ = Family::DdpmLinear;
    s.beta0_ = beta0;
    s.beta1_ = beta1;
    return s;
}

NoiseSchedule NoiseSchedule::flow_linear() {
    NoiseSchedule s;
    s.family_ = Family::FlowLinear;
    return s;
}

NoiseSchedule tangent_schedule(double gamma, double eta1) {
    return NoiseSchedule::tangent(gamma, eta1);
}

std::string NoiseSchedule::name() const {
    switch (family_) {
        case Family::VpCosine: return "cosine";
        case Family::VeGeometric: return "ve";
        case Family::TangentLaw: return "tangent";
        case Family::DdpmLinear: return "ddpm";
        case Family::FlowLinear: return "flow";
    }
    return "unknown";
}

SchedulePoint NoiseSchedule::eval(double t) const {
    check_unit_interval(t);
    SchedulePoint p;
    p.t = t;
    switch (family_) {
        case Family::VpCosine: {
            const double w = kHalfPi;
            // Exact endpoint values so degenerate-step products vanish exactly.
            const double c = (t == 1.0) ? 0.0 : std::cos(w * t);
            const double s = (t == 0.0) ? 0.0 : std::sin(w * t);
            p.alpha = c;
            p.sigma = s;
            p.alpha_dot = -w * s;
            p.sigma_dot = w * c;
            p.alpha_ddot = -w * w * c;
            p.sigma_ddot = -w * w * s;
            return p;
        }
        case Family::TangentLaw: {
            if (std::isinf(eta1_) && t == 1.0) {
                throw std::domain_error("tangent: eta diverges at t=1 when eta1=+inf");
            }
            const double th = theta_;
            const double g = gamma_;
            const double rg = std::sqrt(g);
            const double c = std::cos(th * t);
            const double s = std::sin(th * t);
            const double d2 = c * c + g * s * s;
            const double d = std::sqrt(d2);
            const double d3 = d2 * d;
            const double d5 = d2 * d3;
            p.alpha = c / d;
            p.sigma = rg * s / d;
            p.alpha_dot = -g * th * s / d3;
            p.sigma_dot = rg * th * c / d3;
            p.alpha_ddot = g * th * th * c * (3.0 * (g - 1.0) * s * s - d2) / d5;
            p.sigma_ddot = -rg * th * th * s * (d2 + 3.0 * (g - 1.0) * c * c) / d5;
            return p;
        }
        case Family::VeGeometric: {
            const double ell = std::log(sigma_max_ / sigma_min_);
            double sig;
            if (t == 0.0) {
                sig = sigma_min_;
            } else if (t == 1.0) {
                sig = sigma_max_;
            } else {
                sig = sigma_min_ * std::exp(t * ell);
            }
            p.alpha = 1.0;
            p.sigma = sig;
            p.alpha_dot = 0.0;
            p.sigma_dot = ell * sig;
            p.alpha_ddot = 0.0;
            p.sigma_ddot = ell * ell * sig;
            return p;
        }
        case Family::DdpmLinear: {
            const double db = beta1_ - beta0_;
            const double b_int = beta0_ * t + 0.5 * db * t * t;  // integral of beta
            const double beta = beta0_ + db * t;
            const double a = std::exp(-0.5 * b_int);
            const double s2 = -std::expm1(-b_int);  // sigma^2 = 1 - alpha^2
            const double s = std::sqrt(s2);
            p.alpha = a;
            p.sigma = s;
            p.alpha_dot = -0.5 * beta * a;
            p.alpha_ddot = (0.25 * beta * beta - 0.5 * db) * a;
            // sigma derivatives from sigma^2 = 1 - alpha^2; fused so the
            // t -> 0 limits come out as clean IEEE infinities.
            const double aad = a * p.alpha_dot;
            p.sigma_dot = -aad / s;
            p.sigma_ddot = -((p.alpha_dot * p.alpha_dot + a * p.alpha_ddot) * s2 + aad * aad) /
                           (s2 * s);
            return p;
        }
        case Family::FlowLinear: {
            p.alpha = 1.0 - t;
            p.sigma = t;
            p.alpha_dot = -1.0;
            p.sigma_dot = 1.0;
            p.alpha_ddot = 0.0;
            p.sigma_ddot = 0.0;
            return p;
        }
    }
    throw std::logic_error("unreachable schedule family");
}

void NoiseSchedule::values(double t, double* alpha, double* sigma) const {
    check_unit_interval(t);
    if (family_ == Family::TangentLaw && std::isinf(eta1_) && t == 1.0) {
        // Continuous extension of the variance-preserving boundary.
        *alpha = 0.0;
        *sigma = 1.0;
        return;
    }
    const SchedulePoint p = eval(t);
    *alpha = p.alpha;
    *sigma = p.sigma;
}

double NoiseSchedule::t_min() const {
    return family_ == Family::VeGeometric ? 0.0 : kClip;
}

double NoiseSchedule::t_max() const {
    return family_ == Family::VeGeometric ? 1.0 : 1.0 - kClip;
}

double NoiseSchedule::default_t_lo() const {
    return family_ == Family::VeGeometric ? 0.0 : 1e-3;
}

double NoiseSchedule::default_t_hi() const {
    return family_ == Family::VeGeometric ? 1.0 : 1.0 - 1e-3;
}

double NoiseSchedule::half_logsnr(double t) const {
    check_unit_interval(t);
    const double tc = std::min(std::max(t, t_min()), t_max());
    switch (family_) {
        case Family::VpCosine:
            return -std::log(std::tan(kHalfPi * tc));
        case Family::TangentLaw:
            return -0.5 * std::log(gamma_) - std::log(std::tan(theta_ * tc));
        case Family::VeGeometric:
            return -(std::log(sigma_min_) + tc * std::log(sigma_max_ / sigma_min_));
        case Family::DdpmLinear: {
            const double b_int = beta0_ * tc + 0.5 * (beta1_ - beta0_) * tc * tc;
            return -0.5 * std::log(std::expm1(b_int));
        }
        case Family::FlowLinear:
            return std::log((1.0 - tc) / tc);
    }
    throw std::logic_error("unreachable schedule family");
}

double NoiseSchedule::invert_lambda(double lambda) const {
    const double lo = lambda_min();
    const double hi = lambda_max();
    if (!(lambda >= lo && lambda <= hi)) {
        throw std::out_of_range("invert_lambda: lambda=" + std::to_string(lambda) +
                                " outside attainable [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    }
    switch (family_) {
        case Family::VpCosine:
            return (2.0 / M_PI) * std::atan(std::exp(-lambda));
        case Family::VeGeometric:
            return (-lambda - std::log(sigma_min_)) / std::log(sigma_max_ / sigma_min_);
        default:
            break;
    }
    // Monotone bisection on the clamped interior domain; lambda(t) is
    // strictly decreasing, so the bracket is [t_min, t_max].
    double a = t_min();
    double b = t_max();
    for (int i = 0; i < 200 && (b - a) > 1e-13; ++i) {
        const double mid = 0.5 * (a + b);
        if (half_logsnr(mid) > lambda) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace schedkl
