#include "schedkl/time_grid.hpp"

#include <stdexcept>
#include <string>

namespace schedkl {

TimeGrid make_time_grid(std::vector<double> times) {
    if (times.size() < 2) {
        throw std::invalid_argument("time_grid: need at least 2 points (N >= 1)");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0 && times[i] <= 1.0)) {
            throw std::invalid_argument("time_grid: times[" + std::to_string(i) +
                                        "] outside [0,1]");
        }
        if (i > 0 && times[i] < times[i - 1]) {
            throw std::invalid_argument("time_grid: times must be non-decreasing (index " +
                                        std::to_string(i) + ")");
        }
    }
    TimeGrid g;
    g.times = std::move(times);
    return g;
}

TimeGrid uniform_grid(int n, double t_lo, double t_hi) {
    if (n < 1) {
        throw std::invalid_argument("uniform_grid: N must be >= 1");
    }
    if (!(t_lo < t_hi)) {
        throw std::invalid_argument("uniform_grid: need t_lo < t_hi");
    }
    std::vector<double> times(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        times[static_cast<std::size_t>(j)] =
            t_lo + (static_cast<double>(j) / n) * (t_hi - t_lo);
    }
    times.front() = t_lo;
    times.back() = t_hi;
    return make_time_grid(std::move(times));
}

}  // namespace schedkl
