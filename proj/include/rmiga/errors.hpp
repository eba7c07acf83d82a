#pragma once

#include <stdexcept>
#include <string>

namespace rmiga {

/// Invalid user input or a violated documented precondition.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: singular map, factorization breakdown, non-convergence.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rmiga
