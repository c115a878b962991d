#pragma once

#include <stdexcept>
#include <string>

namespace cnnac {

// Dimension mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index outside the addressable range of a matrix.
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Network spec, controller params or scenario file failed validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weight vector length or segment table inconsistent with the network spec.
class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-loop state became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t)
      : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace cnnac
