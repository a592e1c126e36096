#pragma once

#include <functional>
#include <vector>

#include "schedkl/schedule.hpp"
#include "schedkl/spectrum.hpp"
#include "schedkl/time_grid.hpp"

namespace schedkl {

// Continuous-time analysis of the reverse sampler. The discrete log-gain
// sum S over a uniform N-step grid expands as S = I + E1/N + O(1/N^2),
// which makes the total KL decay like sum(E1^2)/N^2.

// Closed form of the integral term:
//   I = 1/2 log((alpha(t0)^2 mu + sigma(t0)^2) / (alpha(t1)^2 mu + sigma(t1)^2)).
double integral_I(const NoiseSchedule& schedule, double mu, double t0, double t1);

// Quadrature cross-check of I via its integrand
//   F(t) = -(alpha alpha_dot mu + sigma sigma_dot) / (alpha^2 mu + sigma^2).
double integral_I_quadrature(const NoiseSchedule& schedule, double mu, double t0, double t1);

// First-order coefficient by adaptive quadrature:
//   E1 = -(mu/2) Int (alpha sigma_dot - sigma alpha_dot)^2
//                    / (alpha^2 mu + sigma^2)^2 dt.
// Always <= 0. Throws QuadratureError when the integrand is not integrable
// on [t0, t1] (DDPM at exact t0 = 0).
double e1_quadrature(const NoiseSchedule& schedule, double mu, double t0 = 0.0,
                     double t1 = 1.0);

// Closed form of E1 for the tangent family with opening angle theta in
// (0, pi/2]; theta = pi/2 selects the variance-preserving limit
//   -pi^2/16 (sqrt(mu/gamma) + sqrt(gamma/mu)).
double e1_tangent_closed(double gamma, double mu, double theta);

// S - I on a uniform grid. N * residual converges to (t1 - t0) * E1 with E1
// from e1_quadrature over the grid's own span; for the canonical [0,1] grids
// the limit is E1 itself.
double residual(const NoiseSchedule& schedule, const TimeGrid& grid, double mu);

struct AsymptoticReport {
    std::vector<double> I;
    std::vector<double> E1;
};

// Per-mode I and E1 over [t0, t1] for every mode of the spectrum.
AsymptoticReport make_asymptotic_report(const NoiseSchedule& schedule,
                                        const Spectrum& spectrum, double t0 = 0.0,
                                        double t1 = 1.0);

// Leading-order KL prediction sum(E1^2)/N^2 from a precomputed report.
double predicted_kl_at(const AsymptoticReport& report, long n);

// Convenience form computing E1 by quadrature over [0,1] first.
double predicted_kl(const Spectrum& spectrum, const NoiseSchedule& schedule, long n);

// Grid-aware first-order coefficient for the power-uniform lambda grids:
// with the grid parameterized by s in [0,1] through the companded map
// lambda(s), the coefficient becomes
//   E1~ = -(mu/2) Int w(t(s)) (dt/ds)^2 ds,
// reducing to e1_quadrature when the grid is uniform in t. lam_lo is the
// boundary at the sampling start (lowest SNR), lam_hi at the end.
double e1_lambda_weighted(const NoiseSchedule& schedule, double mu, double lam_lo,
                          double lam_hi, double rho);

// sum over modes of e1_lambda_weighted^2 / N^2.
double predicted_kl_lambda(const Spectrum& spectrum, const NoiseSchedule& schedule,
                           double lam_lo, double lam_hi, double rho, long n);

// Noise-to-signal trajectory eta(t) on [0,1] with its derivative; eta1 may
// be +inf (the variance-preserving boundary).
struct EtaTrajectory {
    std::function<double(double)> eta;
    std::function<double(double)> eta_dot;
    double eta0 = 0.0;
    double eta1 = 0.0;
};

// Mode-wise schedule cost J[eta] = Int_0^1 eta_dot^2 / (mu + eta^2)^2 dt,
// evaluated as Int Q_dot^2 dt with Q_dot = eta_dot / (mu + eta^2), which
// stays finite through the eta -> inf boundary.
double functional_J(const EtaTrajectory& trajectory, double mu);

// Q(eta) = arctan(eta / sqrt(mu)) / sqrt(mu); maps eta = +inf to the finite
// boundary value pi / (2 sqrt(mu)).
double q_transform(double eta_value, double mu);

// Global objective J(gamma) = gamma sum(1/mu) + (1/gamma) sum(mu); strictly
// convex with minimizer gamma_star(spectrum).
double objective_J_gamma(const Spectrum& spectrum, double gamma);

// Optimal trajectory for one mode: eta = sqrt(mu) tan(t pi/2), eta(1)=inf.
EtaTrajectory tangent_law_trajectory(double mu);

// Finite-boundary optimum: eta = sqrt(mu) tan(t arctan(sigma_max/sqrt(mu)))
// with eta(1) = sigma_max exactly.
EtaTrajectory ve_tangent_law(double mu, double sigma_max);

// Tangent law perturbed in Q space: Q(t) = t pi/(2 sqrt(mu)) + delta(t).
// For the linear functional J the cross term integrates to
// Q_dot* (delta(1) - delta(0)), so zero-boundary perturbations obey
// J[perturbed] = J[tangent] + Int delta_dot^2 exactly.
EtaTrajectory perturbed_tangent_law(double mu, std::function<double(double)> delta,
                                    std::function<double(double)> delta_dot);

}  // namespace schedkl
