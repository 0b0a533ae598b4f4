#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ulab {

/// Mismatched grids, dimensions or array shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter violates the precondition of the operation it was passed to.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver produced a non-finite state.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(std::size_t step, const std::string& what);

  /// Index of the first time step whose output was not finite.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace ulab
