#pragma once

#include <vector>

#include "schedkl/schedule.hpp"
#include "schedkl/spectrum.hpp"
#include "schedkl/time_grid.hpp"

namespace schedkl {

// Exact discrete analysis of the deterministic reverse sampler on a grid.
// Each mode evolves independently: one step from t_cur down to t_prev
// multiplies the mode amplitude by the gain
//   d = (alpha(t_prev) alpha(t_cur) mu + sigma(t_prev) sigma(t_cur))
//       / (alpha(t_cur)^2 mu + sigma(t_cur)^2),
// and after N steps the output eigenvalue is m = sigma_init^2 * prod d^2.

// Per-mode per-step gain. Accepts t_prev == t_cur (identity step, d = 1).
double mode_gain(const NoiseSchedule& schedule, double t_prev, double t_cur, double mu);

// Sum of log-gains over the grid's steps. Throws DegenerateGainError when a
// gain is exactly zero (use output_eigenvalues to get m = 0 instead).
double log_gain_sum(const NoiseSchedule& schedule, const TimeGrid& grid, double mu);

// Initialization scale sigma(t_N): 1 for VP-setting schedules, the actual
// sigma at the grid start for VE.
double sigma_init(const NoiseSchedule& schedule, const TimeGrid& grid);

// Output covariance eigenvalues m_l, accumulated in log space; a mode with
// an exactly zero gain yields m_l = 0 (a valid degenerate output).
std::vector<double> output_eigenvalues(const NoiseSchedule& schedule, const TimeGrid& grid,
                                       const Spectrum& spectrum);

// Reference (true marginal) eigenvalues n_l = alpha(t0)^2 mu_l + sigma(t0)^2.
std::vector<double> reference_eigenvalues(const NoiseSchedule& schedule, double t0,
                                          const Spectrum& spectrum);

// Gaussian KL between diagonal covariances sharing one eigenbasis:
//   1/2 sum(m/n - log(m/n) - 1).
// Returns +inf when any m_l is 0; 0 exactly when m == n.
double kl_divergence(const std::vector<double>& m, const std::vector<double>& n);

struct KlReport {
    std::vector<double> m;
    std::vector<double> n;
    std::vector<double> log_ratio;  // 1/2 log(m/n), -inf for degenerate modes
    double kl_total = 0.0;
};

// Full per-mode report for one (schedule, grid, spectrum) triple. The
// reference is evaluated at the grid's own smallest time so both
// distributions are compared at the same instant.
KlReport compute_kl_report(const NoiseSchedule& schedule, const TimeGrid& grid,
                           const Spectrum& spectrum);

}  // namespace schedkl
