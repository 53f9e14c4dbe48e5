#pragma once

#include <stdexcept>
#include <string>

namespace gowerslab {

// Thrown when an exact-enumeration path would exceed its operation budget.
// The message suggests the cheaper route where one exists.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when accumulated floating-point error is too large to trust,
// e.g. a correlation sum that should be nonnegative comes out below the clamp.
class numeric_consistency_error : public std::runtime_error {
public:
    explicit numeric_consistency_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown by character construction for a modulus that is not a fundamental
// discriminant shape; names the failing condition.
class conductor_error : public std::invalid_argument {
public:
    explicit conductor_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when a synthetic zero configuration cannot be normalized
// (derivative of the L-function vanishes at the requested point).
class degenerate_config_error : public std::runtime_error {
public:
    explicit degenerate_config_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gowerslab
