#include "schedkl/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "schedkl/kl.hpp"

namespace schedkl {

namespace {

constexpr double kTwoPi = 6.2831853071795864769252867665590;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in (0,1) from the top 53 bits; never returns 0 or 1.
double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

// Box-Muller without state carried between calls, so the draw sequence is a
// pure function of the engine position.
double normal(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Per-step linear maps in application order (sampling start first). The
// denominator and numerator are both polynomials in Sigma_x, so they
// commute and the solve below equals the two-sided product.
std::vector<Eigen::MatrixXd> step_matrices(const MatrixModel& model,
                                           const NoiseSchedule& schedule,
                                           const TimeGrid& grid) {
    const Eigen::MatrixXd sigma_x = model.sigma_x();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(model.k, model.k);
    std::vector<Eigen::MatrixXd> steps;
    steps.reserve(grid.times.size() - 1);
    for (std::size_t j = grid.times.size() - 1; j >= 1; --j) {
        const double t_cur = grid.times[j];
        const double t_prev = grid.times[j - 1];
        double a_prev, s_prev, a_cur, s_cur;
        schedule.values(t_prev, &a_prev, &s_prev);
        schedule.values(t_cur, &a_cur, &s_cur);
        const Eigen::MatrixXd numer = s_prev * s_cur * identity + a_prev * a_cur * sigma_x;
        const Eigen::MatrixXd denom = a_cur * a_cur * sigma_x + s_cur * s_cur * identity;
        Eigen::LLT<Eigen::MatrixXd> llt(denom);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("propagate_covariance: singular step denominator");
        }
        steps.push_back(llt.solve(numer));
    }
    return steps;
}

}  // namespace

MatrixModel make_matrix_model(const Spectrum& spectrum, std::uint64_t seed) {
    const int k = static_cast<int>(spectrum.size());
    std::mt19937_64 rng(splitmix64(seed));
    Eigen::MatrixXd gauss(k, k);
    for (int c = 0; c < k; ++c) {
        for (int r = 0; r < k; ++r) {
            gauss(r, c) = normal(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
    const Eigen::MatrixXd r_factor = qr.matrixQR();
    for (int j = 0; j < k; ++j) {
        if (r_factor(j, j) < 0.0) {
            q.col(j) *= -1.0;
        }
    }
    MatrixModel model;
    model.k = k;
    model.u = std::move(q);
    model.lambda = Eigen::Map<const Eigen::VectorXd>(spectrum.mu.data(), k);
    return model;
}

Eigen::MatrixXd propagate_covariance(const MatrixModel& model, const NoiseSchedule& schedule,
                                     const TimeGrid& grid) {
    const double s_init = sigma_init(schedule, grid);
    Eigen::MatrixXd cov =
        s_init * s_init * Eigen::MatrixXd::Identity(model.k, model.k);
    for (const Eigen::MatrixXd& step : step_matrices(model, schedule, grid)) {
        cov = step * cov * step.transpose();
    }
    return cov;
}

McResult monte_carlo_covariance(const MatrixModel& model, const NoiseSchedule& schedule,
                                const TimeGrid& grid, const McConfig& cfg) {
    if (cfg.n_samples < 1) {
        throw std::invalid_argument("monte_carlo_covariance: n_samples must be >= 1");
    }
    if (cfg.batch < 1) {
        throw std::invalid_argument("monte_carlo_covariance: batch must be >= 1");
    }
    const std::vector<Eigen::MatrixXd> steps = step_matrices(model, schedule, grid);
    const double s_init = sigma_init(schedule, grid);
    const long n_batches = (cfg.n_samples + cfg.batch - 1) / cfg.batch;
    std::vector<Eigen::MatrixXd> partials(static_cast<std::size_t>(n_batches));

    std::atomic<long> next_batch{0};
    const auto worker = [&]() {
        for (;;) {
            const long bi = next_batch.fetch_add(1);
            if (bi >= n_batches) {
                return;
            }
            const long offset = bi * static_cast<long>(cfg.batch);
            const int count =
                static_cast<int>(std::min<long>(cfg.batch, cfg.n_samples - offset));
            std::mt19937_64 rng(splitmix64(cfg.seed + 0x9E3779B97F4A7C15ULL *
                                                          static_cast<std::uint64_t>(bi + 1)));
            Eigen::MatrixXd x(model.k, count);
            for (int c = 0; c < count; ++c) {
                for (int r = 0; r < model.k; ++r) {
                    x(r, c) = s_init * normal(rng);
                }
            }
            for (const Eigen::MatrixXd& step : steps) {
                x = step * x;
            }
            partials[static_cast<std::size_t>(bi)] = x * x.transpose();
        }
    };

    const int n_threads =
        std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_batches)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }

    // Fixed-order reduction keeps the result independent of thread count.
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(model.k, model.k);
    for (const Eigen::MatrixXd& g : partials) {
        total += g;
    }
    McResult result;
    result.covariance = total / static_cast<double>(cfg.n_samples);
    result.n_samples = cfg.n_samples;
    return result;
}

double eigenvalue_standard_error(double eigenvalue, long n_samples) {
    return eigenvalue * std::sqrt(2.0 / static_cast<double>(n_samples));
}

double kl_matrix_form(const Eigen::MatrixXd& p_cov, const Eigen::MatrixXd& q_cov) {
    if (p_cov.rows() != p_cov.cols() || q_cov.rows() != q_cov.cols() ||
        p_cov.rows() != q_cov.rows()) {
        throw std::invalid_argument("kl_matrix_form: dimension mismatch");
    }
    const Eigen::MatrixXd p_sym = 0.5 * (p_cov + p_cov.transpose());
    const Eigen::MatrixXd q_sym = 0.5 * (q_cov + q_cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(q_sym);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("kl_matrix_form: q_cov is not positive definite");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(p_sym, q_sym,
                                                                    Eigen::EigenvaluesOnly);
    const Eigen::VectorXd s = solver.eigenvalues();
    const double scale = s.cwiseAbs().maxCoeff();
    double sum = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) < -1e-9 * scale) {
            throw std::invalid_argument("kl_matrix_form: p_cov is not positive semidefinite");
        }
        if (s(i) <= 0.0) {
            return kInfinity;
        }
        sum += s(i) - std::log(s(i)) - 1.0;
    }
    return 0.5 * sum;
}

}  // namespace schedkl
