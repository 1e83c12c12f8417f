#pragma once

#include <stdexcept>
#include <string>

namespace polylin {

/// Raised when an iterative or quadrature routine cannot produce a trustworthy number.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The target has zero curvature on the whole interval, so any partition is exact
/// and no knot distribution can be normalized.
class linear_function_error : public numerical_error {
public:
    linear_function_error()
        : numerical_error("function is linear; any partition is exact") {}
};

} // namespace polylin
