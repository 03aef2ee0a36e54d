#pragma once

#include <stdexcept>
#include <string>

namespace mdm {

/// Bad input: malformed sets, out-of-range parameters, failed preconditions.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation hit a numeric or capacity limit (overflow, cap reached, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mdm
