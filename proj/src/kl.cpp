#include "schedkl/kl.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "schedkl/errors.hpp"

namespace schedkl {

double mode_gain(const NoiseSchedule& schedule, double t_prev, double t_cur, double mu) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("mode_gain: mu must be positive");
    }
    if (!(t_prev <= t_cur)) {
        throw std::invalid_argument("mode_gain: need t_prev <= t_cur");
    }
    double a_prev, s_prev, a_cur, s_cur;
    schedule.values(t_prev, &a_prev, &s_prev);
    schedule.values(t_cur, &a_cur, &s_cur);
    return (a_prev * a_cur * mu + s_prev * s_cur) / (a_cur * a_cur * mu + s_cur * s_cur);
}

double log_gain_sum(const NoiseSchedule& schedule, const TimeGrid& grid, double mu) {
    double sum = 0.0;
    for (std::size_t j = 1; j < grid.times.size(); ++j) {
        const double d = mode_gain(schedule, grid.times[j - 1], grid.times[j], mu);
        if (d == 0.0) {
            throw DegenerateGainError("log_gain_sum: zero gain at step " + std::to_string(j));
        }
        sum += std::log(d);
    }
    return sum;
}

double sigma_init(const NoiseSchedule& schedule, const TimeGrid& grid) {
    if (schedule.setting() == Setting::Vp) {
        return 1.0;
    }
    double a, s;
    schedule.values(grid.times.back(), &a, &s);
    return s;
}

std::vector<double> output_eigenvalues(const NoiseSchedule& schedule, const TimeGrid& grid,
                                       const Spectrum& spectrum) {
    const double s_init = sigma_init(schedule, grid);
    std::vector<double> m(spectrum.size());
    for (std::size_t l = 0; l < spectrum.size(); ++l) {
        const double mu = spectrum.mu[l];
        double log_sum = 0.0;
        bool degenerate = false;
        for (std::size_t j = 1; j < grid.times.size(); ++j) {
            const double d = mode_gain(schedule, grid.times[j - 1], grid.times[j], mu);
            if (d == 0.0) {
                degenerate = true;
                break;
            }
            log_sum += std::log(d);
        }
        m[l] = degenerate ? 0.0 : s_init * s_init * std::exp(2.0 * log_sum);
    }
    return m;
}

std::vector<double> reference_eigenvalues(const NoiseSchedule& schedule, double t0,
                                          const Spectrum& spectrum) {
    if (!(t0 >= 0.0 && t0 <= 1.0)) {
        throw std::invalid_argument("reference_eigenvalues: t0 outside [0,1]");
    }
    double a, s;
    schedule.values(t0, &a, &s);
    std::vector<double> n(spectrum.size());
    for (std::size_t l = 0; l < spectrum.size(); ++l) {
        n[l] = a * a * spectrum.mu[l] + s * s;
    }
    return n;
}

double kl_divergence(const std::vector<double>& m, const std::vector<double>& n) {
    if (m.size() != n.size()) {
        throw std::invalid_argument("kl_divergence: dimension mismatch (" +
                                    std::to_string(m.size()) + " vs " +
                                    std::to_string(n.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < m.size(); ++l) {
        if (!(n[l] > 0.0)) {
            throw std::invalid_argument("kl_divergence: n must be positive at mode " +
                                        std::to_string(l));
        }
        if (m[l] < 0.0) {
            throw std::invalid_argument("kl_divergence: m must be nonnegative at mode " +
                                        std::to_string(l));
        }
        if (m[l] == 0.0) {
            return kInfinity;
        }
        // u - log(1+u) with u = m/n - 1 keeps precision when m ~ n.
        const double u = m[l] / n[l] - 1.0;
        sum += u - std::log1p(u);
    }
    return 0.5 * sum;
}

KlReport compute_kl_report(const NoiseSchedule& schedule, const TimeGrid& grid,
                           const Spectrum& spectrum) {
    KlReport report;
    report.m = output_eigenvalues(schedule, grid, spectrum);
    report.n = reference_eigenvalues(schedule, grid.times.front(), spectrum);
    report.log_ratio.resize(spectrum.size());
    for (std::size_t l = 0; l < spectrum.size(); ++l) {
        report.log_ratio[l] =
            report.m[l] == 0.0 ? -kInfinity : 0.5 * std::log(report.m[l] / report.n[l]);
    }
    report.kl_total = kl_divergence(report.m, report.n);
    return report;
}

}  // namespace schedkl
