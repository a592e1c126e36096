#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "schedkl/schedule.hpp"
#include "schedkl/spectrum.hpp"
#include "schedkl/time_grid.hpp"

namespace schedkl {

// Full-matrix verification paths. The production code works purely on
// eigenvalues; this module rebuilds the covariance Sigma_x = U Lambda U^T
// with a random orthogonal U and checks that the matrix recursion agrees.

struct MatrixModel {
    int k = 0;
    Eigen::MatrixXd u;        // orthogonal basis
    Eigen::VectorXd lambda;   // eigenvalues, descending

    Eigen::MatrixXd sigma_x() const { return u * lambda.asDiagonal() * u.transpose(); }
};

// Haar-style orthogonal basis: QR of a seeded Gaussian matrix with the
// diagonal sign fixed for uniqueness.
MatrixModel make_matrix_model(const Spectrum& spectrum, std::uint64_t seed);

// Exact covariance of the reverse-sampler output: starting from
// sigma_init^2 I, conjugates by the per-step linear map
//   A_j = (sigma_prev sigma_cur I + alpha_prev alpha_cur Sigma_x)
//         (alpha_cur^2 Sigma_x + sigma_cur^2 I)^{-1},
// solved via Cholesky factorization rather than explicit inversion.
Eigen::MatrixXd propagate_covariance(const MatrixModel& model, const NoiseSchedule& schedule,
                                     const TimeGrid& grid);

struct McConfig {
    long n_samples = 200000;
    std::uint64_t seed = 42;
    int batch = 4096;
    int threads = 1;
};

struct McResult {
    Eigen::MatrixXd covariance;
    long n_samples = 0;
};

// Simulates the deterministic reverse recursion with the optimal linear
// estimator from N(0, sigma_init^2 I) draws and returns the sample
// covariance (second moment about zero; the process mean is zero).
// Batches use independent seed-derived substreams and are reduced in batch
// order, so the result is bitwise reproducible for any thread count.
McResult monte_carlo_covariance(const MatrixModel& model, const NoiseSchedule& schedule,
                                const TimeGrid& grid, const McConfig& cfg);

// Gaussian fourth-moment approximation of the standard error of one
// empirical eigenvalue estimate.
double eigenvalue_standard_error(double eigenvalue, long n_samples);

// Gaussian KL 1/2 (tr(Q^{-1} P) - log det(Q^{-1} P) - k) for symmetric
// covariances; P may be positive semidefinite (degenerate modes give +inf),
// Q must be positive definite.
double kl_matrix_form(const Eigen::MatrixXd& p_cov, const Eigen::MatrixXd& q_cov);

}  // namespace schedkl
