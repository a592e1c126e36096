#include "schedkl/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace schedkl {

Spectrum make_spectrum(std::vector<double> mu) {
    if (mu.empty()) {
        throw std::invalid_argument("spectrum: must be non-empty");
    }
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (!(mu[i] > 0.0)) {
            throw std::invalid_argument("spectrum: mode " + std::to_string(i) +
                                        ": eigenvalue must be positive (got " +
                                        std::to_string(mu[i]) + ")");
        }
        if (i > 0 && mu[i] > mu[i - 1]) {
            throw std::invalid_argument("spectrum: mode " + std::to_string(i) +
                                        ": eigenvalues must be sorted descending");
        }
    }
    Spectrum s;
    s.mu = std::move(mu);
    return s;
}

Spectrum power_law_spectrum(const PowerLawParams& params) {
    if (params.k < 1) {
        throw std::invalid_argument("power_law_spectrum: k must be >= 1");
    }
    if (!(params.p >= 0.0)) {
        throw std::invalid_argument("power_law_spectrum: p must be >= 0");
    }
    if (!(params.i0 > 0.0)) {
        throw std::invalid_argument("power_law_spectrum: i0 must be > 0");
    }
    if (!(params.mu_max > 0.0) || !(params.mu_min >= 0.0)) {
        throw std::invalid_argument("power_law_spectrum: need mu_max > 0 and mu_min >= 0");
    }
    if (params.p > 0.0 && params.mu_max <= params.mu_min) {
        throw std::invalid_argument(
            "power_law_spectrum: mu_max <= mu_min with p > 0 leaves no room for decay");
    }
    const double eps = params.mu_min;
    const double c = (params.mu_max - eps) * std::pow(1.0 + params.i0, params.p);
    std::vector<double> mu(static_cast<std::size_t>(params.k));
    for (int l = 1; l <= params.k; ++l) {
        mu[static_cast<std::size_t>(l - 1)] =
            c * std::pow(static_cast<double>(l) + params.i0, -params.p) + eps;
    }
    mu[0] = params.mu_max;  // calibration is exact by construction; pin the head
    return make_spectrum(std::move(mu));
}

double gamma_star(const Spectrum& spectrum) {
    if (spectrum.mu.empty()) {
        throw std::invalid_argument("gamma_star: empty spectrum");
    }
    double sum = 0.0;
    double sum_inv = 0.0;
    for (double m : spectrum.mu) {
        if (!(m > 0.0)) {
            throw std::invalid_argument("gamma_star: eigenvalues must be positive");
        }
        sum += m;
        sum_inv += 1.0 / m;
    }
    return std::sqrt(sum / sum_inv);
}

}  // namespace schedkl
