#include "schedkl/discretize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace schedkl {

double signed_power(double x, double e) {
    if (!(e > 0.0)) {
        throw std::invalid_argument("signed_power: exponent must be positive");
    }
    if (e == 1.0 || x == 0.0) {
        return x;
    }
    return std::copysign(std::pow(std::abs(x), e), x);
}

LambdaSequence power_uniform(double lambda_t0, double lambda_tN, int n, double rho) {
    if (!(lambda_t0 > lambda_tN)) {
        throw std::invalid_argument("power_uniform: need lambda_t0 > lambda_tN");
    }
    if (n < 1) {
        throw std::invalid_argument("power_uniform: N must be >= 1");
    }
    if (!(rho >= 1.0)) {
        throw std::invalid_argument("power_uniform: rho must be >= 1");
    }
    const double a = signed_power(lambda_tN, 1.0 / rho);
    const double b = signed_power(lambda_t0, 1.0 / rho);
    LambdaSequence seq;
    seq.rho = rho;
    seq.lambdas.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double u = a + (static_cast<double>(i) / n) * (b - a);
        seq.lambdas[static_cast<std::size_t>(i)] = signed_power(u, rho);
    }
    seq.lambdas.front() = lambda_tN;  // pin boundaries exactly
    seq.lambdas.back() = lambda_t0;
    for (std::size_t i = 1; i < seq.lambdas.size(); ++i) {
        if (!(seq.lambdas[i] > seq.lambdas[i - 1])) {
            throw std::runtime_error("power_uniform: sequence not strictly increasing at index " +
                                     std::to_string(i));
        }
    }
    return seq;
}

TimeGrid grid_from_lambdas(const NoiseSchedule& schedule, const LambdaSequence& seq) {
    const std::size_t count = seq.lambdas.size();
    if (count < 2) {
        throw std::invalid_argument("grid_from_lambdas: need at least 2 lambdas");
    }
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i) {
        double t;
        try {
            t = schedule.invert_lambda(seq.lambdas[i]);
        } catch (const std::out_of_range& err) {
            throw std::out_of_range("grid_from_lambdas: index " + std::to_string(i) + ": " +
                                    err.what());
        }
        // lambda index 0 is the sampling start (largest t), which the
        // TimeGrid convention stores last.
        times[count - 1 - i] = t;
    }
    for (std::size_t i = 1; i < count; ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::runtime_error("grid_from_lambdas: times not strictly increasing at index " +
                                     std::to_string(i));
        }
    }
    return make_time_grid(std::move(times));
}

StepTable make_step_table(const NoiseSchedule& schedule, const TimeGrid& grid,
                          const LambdaSequence& seq) {
    if (grid.times.size() != seq.lambdas.size()) {
        throw std::invalid_argument("make_step_table: grid and lambda sequence sizes differ");
    }
    StepTable table;
    table.family = schedule.name();
    switch (schedule.family()) {
        case Family::TangentLaw:
            table.params.emplace_back("gamma", schedule.gamma());
            table.params.emplace_back("eta1", schedule.eta1());
            break;
        case Family::VeGeometric:
            table.params.emplace_back("sigma_min", schedule.sigma_min());
            table.params.emplace_back("sigma_max", schedule.sigma_max());
            break;
        case Family::DdpmLinear:
            table.params.emplace_back("beta0", schedule.beta0());
            table.params.emplace_back("beta1", schedule.beta1());
            break;
        default:
            break;
    }
    table.rho = seq.rho;
    table.nfe = grid.n_steps();
    table.timesteps.assign(grid.times.rbegin(), grid.times.rend());
    table.lambdas = seq.lambdas;
    return table;
}

}  // namespace schedkl
