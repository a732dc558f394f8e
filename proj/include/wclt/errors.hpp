#pragma once

#include <stdexcept>
#include <string>

namespace wclt {

// Invalid configuration or parameter values. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A statistical verdict was requested but the inputs cannot support one
// (e.g. too few replicates). The CLI maps this to exit code 3.
struct VerdictError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: solver residual out of tolerance, negative variance
// beyond rounding, and the like. The CLI maps this to exit code 4.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace wclt
