#pragma once

#include <cstddef>
#include <vector>

namespace schedkl {

// Reverse-sampling time grid. times is stored ascending: times[0] = t_0 is
// where sampling ends and times[N] = t_N is where it starts. Validation
// accepts repeated values (zero-width steps are legitimate degenerate
// inputs); the factory functions below always emit strictly increasing
// grids.
struct TimeGrid {
    std::vector<double> times;

    int n_steps() const { return static_cast<int>(times.size()) - 1; }
};

// Validates bounds ([0,1]), ordering (non-decreasing) and N >= 1.
TimeGrid make_time_grid(std::vector<double> times);

// N+1 equally spaced points on [t_lo, t_hi] with exact endpoints.
TimeGrid uniform_grid(int n, double t_lo = 0.0, double t_hi = 1.0);

}  // namespace schedkl
