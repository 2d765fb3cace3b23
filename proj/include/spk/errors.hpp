#pragma once

#include <stdexcept>
#include <string>

namespace spk {

// Invalid input: malformed files, inconsistent trees, out-of-range parameters.
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap before reaching its tolerance.
// The CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spk
