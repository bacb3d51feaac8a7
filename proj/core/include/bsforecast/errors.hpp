#pragma once

#include <stdexcept>
#include <string>

namespace bsf {

/// Bad user input: malformed files, violated preconditions, invalid flags.
/// The CLI maps this to exit code 1.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-convergence, divergence, non-finite results.
/// The CLI maps this to exit code 2.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bsf
