#pragma once

#include <stdexcept>
#include <string>

namespace gfield {

// Parameter outside the model's domain (negative noise, R <= 0, m outside [0,1], ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation produced NaN/inf or failed to converge where convergence is required.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The requested configuration cannot be realized (secrecy setups, sizing budgets).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace gfield
