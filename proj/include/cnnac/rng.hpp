#pragma once

#include <cstdint>
#include <random>

namespace cnnac {

// Portable uniform source: std::mt19937_64 (fully specified by the standard)
// with an explicit 53-bit mantissa mapping, so a seed yields the same draws
// on every conforming implementation. std::uniform_real_distribution is not
// used because its algorithm is implementation-defined.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cnnac
