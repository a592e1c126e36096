#pragma once

#include <string>
#include <vector>

#include "schedkl/schedule.hpp"
#include "schedkl/time_grid.hpp"

namespace schedkl {

// sign(x) |x|^e, the odd extension of the power map; exponent must be
// positive. e = 1 returns x bitwise so the uniform rule stays exact.
double signed_power(double x, double e);

// Companded half-logSNR sequence: lambdas are ascending from the sampling
// start (lambda_0, lowest SNR) to the end (lambda_N, highest SNR).
struct LambdaSequence {
    std::vector<double> lambdas;
    double rho = 1.0;

    int n_steps() const { return static_cast<int>(lambdas.size()) - 1; }
};

// Power-uniform spacing: uniform interpolation between the signed rho-th
// roots of the boundaries, mapped back through signed_power(. , rho).
// rho = 1 degenerates to the uniform-lambda rule exactly; endpoints are
// pinned to the requested boundaries. lambda_t0 is the high-SNR (end)
// boundary and must exceed lambda_tN.
LambdaSequence power_uniform(double lambda_t0, double lambda_tN, int n, double rho);

// Maps a lambda sequence to sampler times via invert_lambda, reversing the
// index order so the TimeGrid convention (times ascending, sampling start
// last) holds. Out-of-range lambdas raise std::out_of_range naming the
// offending index.
TimeGrid grid_from_lambdas(const NoiseSchedule& schedule, const LambdaSequence& seq);

// Sampler-ready step table; timesteps run in sampling order (decreasing t),
// lambdas ascending, N+1 entries each for an N-step budget.
struct StepTable {
    std::string family;
    std::vector<std::pair<std::string, double>> params;  // name -> value, fixed order
    double rho = 1.0;
    int nfe = 0;
    std::vector<double> timesteps;
    std::vector<double> lambdas;
};

StepTable make_step_table(const NoiseSchedule& schedule, const TimeGrid& grid,
                          const LambdaSequence& seq);

}  // namespace schedkl
