#pragma once

#include <stdexcept>
#include <string>

namespace gf {

// Exit-code contract: 0 success, 2 config error, 3 numeric/domain error,
// 4 non-convergence.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested size exceeds a configured cap (kernel size, blow-up, motif).
struct SizeLimitError : ConfigError {
    explicit SizeLimitError(const std::string& msg) : ConfigError(msg) {}
};

// Motif too large for exact enumeration and no fast path applies.
struct ComplexityError : ConfigError {
    explicit ComplexityError(const std::string& msg) : ConfigError(msg) {}
};

// Value outside the mathematical domain (entropy at {0,1}, nonpositive
// density, entry outside the box).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergenceError : std::runtime_error {
    explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gf
