#include "schedkl/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "schedkl/discretize.hpp"
#include "schedkl/kl.hpp"
#include "schedkl/quadrature.hpp"

namespace schedkl {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

// Squared Wronskian over squared marginal variance: the integrand of E1.
double e1_integrand(const NoiseSchedule& schedule, double mu, double t) {
    const SchedulePoint p = schedule.eval(t);
    const double w = p.alpha * p.sigma_dot - p.sigma * p.alpha_dot;
    const double n = p.alpha * p.alpha * mu + p.sigma * p.sigma;
    return (w * w) / (n * n);
}

}  // namespace

double integral_I(const NoiseSchedule& schedule, double mu, double t0, double t1) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("integral_I: mu must be positive");
    }
    if (!(t0 <= t1)) {
        throw std::invalid_argument("integral_I: need t0 <= t1");
    }
    double a0, s0, a1, s1;
    schedule.values(t0, &a0, &s0);
    schedule.values(t1, &a1, &s1);
    const double n0 = a0 * a0 * mu + s0 * s0;
    const double n1 = a1 * a1 * mu + s1 * s1;
    if (!(n0 > 0.0) || !(n1 > 0.0)) {
        throw std::domain_error("integral_I: marginal variance vanishes at an endpoint");
    }
    return 0.5 * std::log(n0 / n1);
}

double integral_I_quadrature(const NoiseSchedule& schedule, double mu, double t0, double t1) {
    const auto f = [&](double t) {
        const SchedulePoint p = schedule.eval(t);
        const double num = p.alpha * p.alpha_dot * mu + p.sigma * p.sigma_dot;
        const double den = p.alpha * p.alpha * mu + p.sigma * p.sigma;
        return -num / den;
    };
    return integrate(f, t0, t1).value;
}

double e1_quadrature(const NoiseSchedule& schedule, double mu, double t0, double t1) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("e1_quadrature: mu must be positive");
    }
    const auto f = [&](double t) { return e1_integrand(schedule, mu, t); };
    return -0.5 * mu * integrate(f, t0, t1).value;
}

double e1_tangent_closed(double gamma, double mu, double theta) {
    if (!(gamma > 0.0) || !(mu > 0.0)) {
        throw std::invalid_argument("e1_tangent_closed: gamma and mu must be positive");
    }
    if (!(theta > 0.0 && theta <= kHalfPi)) {
        throw std::invalid_argument("e1_tangent_closed: theta must be in (0, pi/2]");
    }
    if (theta >= kHalfPi) {
        // Variance-preserving boundary limit.
        return -kHalfPi * kHalfPi * 0.25 *
               (std::sqrt(mu / gamma) + std::sqrt(gamma / mu));
    }
    const double tan_th = std::tan(theta);
    const double term1 =
        (mu + gamma) / std::sqrt(mu * gamma) * std::atan(std::sqrt(gamma / mu) * tan_th);
    const double term2 = (gamma - mu) * tan_th / (mu + gamma * tan_th * tan_th);
    return -0.25 * theta * (term1 + term2);
}

double residual(const NoiseSchedule& schedule, const TimeGrid& grid, double mu) {
    const int n = grid.n_steps();
    const double h = (grid.times.back() - grid.times.front()) / n;
    for (int j = 1; j <= n; ++j) {
        const double step = grid.times[static_cast<std::size_t>(j)] -
                            grid.times[static_cast<std::size_t>(j - 1)];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw std::invalid_argument("residual: grid must be uniform");
        }
    }
    const double s = log_gain_sum(schedule, grid, mu);
    const double i = integral_I(schedule, mu, grid.times.front(), grid.times.back());
    return s - i;
}

double predicted_kl_at(const AsymptoticReport& report, long n) {
    if (n < 1) {
        throw std::invalid_argument("predicted_kl_at: N must be >= 1");
    }
    double sum = 0.0;
    for (double e : report.E1) {
        sum += e * e;
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

AsymptoticReport make_asymptotic_report(const NoiseSchedule& schedule,
                                        const Spectrum& spectrum, double t0, double t1) {
    AsymptoticReport report;
    report.I.reserve(spectrum.size());
    report.E1.reserve(spectrum.size());
    for (double mu : spectrum.mu) {
        report.I.push_back(integral_I(schedule, mu, t0, t1));
        report.E1.push_back(e1_quadrature(schedule, mu, t0, t1));
    }
    return report;
}

double predicted_kl(const Spectrum& spectrum, const NoiseSchedule& schedule, long n) {
    return predicted_kl_at(make_asymptotic_report(schedule, spectrum), n);
}

double e1_lambda_weighted(const NoiseSchedule& schedule, double mu, double lam_lo,
                          double lam_hi, double rho) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("e1_lambda_weighted: mu must be positive");
    }
    if (!(lam_hi > lam_lo)) {
        throw std::invalid_argument("e1_lambda_weighted: need lam_lo < lam_hi");
    }
    if (!(rho >= 1.0)) {
        throw std::invalid_argument("e1_lambda_weighted: rho must be >= 1");
    }
    const double a = signed_power(lam_lo, 1.0 / rho);
    const double b = signed_power(lam_hi, 1.0 / rho);
    const double att_lo = schedule.lambda_min();
    const double att_hi = schedule.lambda_max();
    const auto f = [&](double s) {
        const double u = a + s * (b - a);
        double lam = signed_power(u, rho);
        lam = std::min(std::max(lam, att_lo), att_hi);
        const double t = schedule.invert_lambda(lam);
        const SchedulePoint p = schedule.eval(t);
        const double lam_dot = p.alpha_dot / p.alpha - p.sigma_dot / p.sigma;
        const double dlam_ds = rho * std::pow(std::abs(u), rho - 1.0) * (b - a);
        const double dt_ds = dlam_ds / lam_dot;
        const double w = p.alpha * p.sigma_dot - p.sigma * p.alpha_dot;
        const double nn = p.alpha * p.alpha * mu + p.sigma * p.sigma;
        return (w * w) / (nn * nn) * dt_ds * dt_ds;
    };
    std::vector<double> breaks;
    if (a < 0.0 && b > 0.0) {
        breaks.push_back(-a / (b - a));  // |u|^(rho-1) kink at u = 0
    }
    return -0.5 * mu * integrate(f, 0.0, 1.0, breaks).value;
}

double predicted_kl_lambda(const Spectrum& spectrum, const NoiseSchedule& schedule,
                           double lam_lo, double lam_hi, double rho, long n) {
    if (n < 1) {
        throw std::invalid_argument("predicted_kl_lambda: N must be >= 1");
    }
    double sum = 0.0;
    for (double mu : spectrum.mu) {
        const double e = e1_lambda_weighted(schedule, mu, lam_lo, lam_hi, rho);
        sum += e * e;
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

double functional_J(const EtaTrajectory& trajectory, double mu) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("functional_J: mu must be positive");
    }
    const auto f = [&](double t) {
        const double e = trajectory.eta(t);
        const double q_dot = trajectory.eta_dot(t) / (mu + e * e);
        return q_dot * q_dot;
    };
    return integrate(f, 0.0, 1.0).value;
}

double q_transform(double eta_value, double mu) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("q_transform: mu must be positive");
    }
    const double rm = std::sqrt(mu);
    if (std::isinf(eta_value)) {
        return kHalfPi / rm;
    }
    return std::atan(eta_value / rm) / rm;
}

double objective_J_gamma(const Spectrum& spectrum, double gamma) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("objective_J_gamma: gamma must be positive");
    }
    double sum = 0.0;
    double sum_inv = 0.0;
    for (double m : spectrum.mu) {
        sum += m;
        sum_inv += 1.0 / m;
    }
    return gamma * sum_inv + sum / gamma;
}

EtaTrajectory tangent_law_trajectory(double mu) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("tangent_law_trajectory: mu must be positive");
    }
    const double rm = std::sqrt(mu);
    EtaTrajectory traj;
    traj.eta = [rm](double t) {
        return t == 1.0 ? kInfinity : rm * std::tan(kHalfPi * t);
    };
    traj.eta_dot = [rm](double t) {
        const double tn = std::tan(kHalfPi * t);
        return rm * kHalfPi * (1.0 + tn * tn);
    };
    traj.eta0 = 0.0;
    traj.eta1 = kInfinity;
    return traj;
}

EtaTrajectory ve_tangent_law(double mu, double sigma_max) {
    if (!(mu > 0.0) || !(sigma_max > 0.0)) {
        throw std::invalid_argument("ve_tangent_law: mu and sigma_max must be positive");
    }
    const double rm = std::sqrt(mu);
    const double th = std::atan(sigma_max / rm);
    EtaTrajectory traj;
    traj.eta = [rm, th, sigma_max](double t) {
        return t == 1.0 ? sigma_max : rm * std::tan(th * t);
    };
    traj.eta_dot = [rm, th](double t) {
        const double tn = std::tan(th * t);
        return rm * th * (1.0 + tn * tn);
    };
    traj.eta0 = 0.0;
    traj.eta1 = sigma_max;
    return traj;
}

EtaTrajectory perturbed_tangent_law(double mu, std::function<double(double)> delta,
                                    std::function<double(double)> delta_dot) {
    if (!(mu > 0.0)) {
        throw std::invalid_argument("perturbed_tangent_law: mu must be positive");
    }
    const double rm = std::sqrt(mu);
    auto d = std::move(delta);
    auto dd = std::move(delta_dot);
    // Q(t) = t pi/(2 rm) + delta(t), eta = rm tan(rm Q). The tan argument is
    // written the same way in both lambdas so Q_dot = eta_dot / (mu + eta^2)
    // reduces to pi/(2 rm) + delta_dot without rounding residue.
    EtaTrajectory traj;
    traj.eta = [rm, d](double t) {
        const double phi = kHalfPi * t + rm * d(t);
        return rm * std::tan(phi);
    };
    traj.eta_dot = [rm, d, dd](double t) {
        const double phi = kHalfPi * t + rm * d(t);
        const double tn = std::tan(phi);
        return rm * (1.0 + tn * tn) * (kHalfPi + rm * dd(t));
    };
    traj.eta0 = traj.eta(0.0);
    traj.eta1 = traj.eta(1.0);
    return traj;
}

}  // namespace schedkl
