#pragma once

#include <stdexcept>
#include <string>

namespace schedkl {

// Adaptive quadrature exhausted its subdivision budget (or hit a
// non-integrable singularity) before meeting the error target.
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

// A per-step gain is exactly zero, so a log-domain accumulation is undefined.
class DegenerateGainError : public std::runtime_error {
public:
    explicit DegenerateGainError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed experiment configuration or CLI input.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A verification battery (oracle cross-checks) reported a failing check.
class VerificationError : public std::runtime_error {
public:
    explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace schedkl
