#pragma once

#include <functional>
#include <vector>

namespace schedkl {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_intervals = 10000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

// Globally adaptive Gauss-Kronrod 7/15 integration of f over [a, b].
// The worst interval (by error estimate) is bisected until the summed
// estimate drops below max(abs_tol, rel_tol * |value|). All evaluation
// nodes are strictly interior, so integrable endpoint singularities are
// handled without special casing. Throws QuadratureError when the interval
// budget is exhausted, when an interval can no longer be split, or when
// the running total stops being finite (divergent integrand).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = QuadratureOptions());

// Same, but with interior breakpoints (for integrands with known kinks).
// points must be sorted ascending; entries outside (a, b) are ignored.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& points,
                           const QuadratureOptions& opts = QuadratureOptions());

}  // namespace schedkl
