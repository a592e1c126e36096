#pragma once

#include <vector>

namespace schedkl {

// Eigenvalues of the source covariance, sorted descending, all positive.
// Only eigenvalues are stored; the orthogonal basis never enters the
// closed-form analysis (the oracle module materializes one for testing).
struct Spectrum {
    std::vector<double> mu;

    std::size_t size() const { return mu.size(); }
};

// Validates positivity (reporting the offending mode index) and descending
// order, then wraps the values.
Spectrum make_spectrum(std::vector<double> mu);

// Shifted power-law family mu_l = C (l + i0)^(-p) + eps with eps = mu_min
// and C calibrated so mu_1 = mu_max. Defaults mimic a heavy-tailed natural
// image spectrum.
struct PowerLawParams {
    int k = 128;
    double p = 1.5;
    double i0 = 3.0;
    double mu_max = 5.0;
    double mu_min = 1e-3;
};

Spectrum power_law_spectrum(const PowerLawParams& params);

// Optimal global tangent-law coefficient: sqrt(sum(mu) / sum(1/mu)).
double gamma_star(const Spectrum& spectrum);

}  // namespace schedkl
