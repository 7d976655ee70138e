#pragma once

#include <stdexcept>
#include <string>

namespace sitemap {

// Bad inputs to an operation: dimension mismatches, invalid arguments.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed files, version mismatches, invariant violations on load.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration: unknown keys, out-of-range values, missing archives.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear-algebra failures (non-positive-definite systems and the like).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sitemap
