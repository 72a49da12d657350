#pragma once

#include <stdexcept>
#include <string>

namespace hofa {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input, schema violation, or violated operation precondition.
struct validation_error : error {
    using error::error;
};

/// Work or memory would exceed the configured budget.
struct resource_error : error {
    using error::error;
};

/// Invariant that should be unreachable failed; indicates a library bug.
struct internal_error : error {
    using error::error;
};

} // namespace hofa
