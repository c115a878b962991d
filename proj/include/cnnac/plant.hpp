#pragma once

#include <functional>
#include <limits>
#include <span>

#include "cnnac/mat.hpp"

namespace cnnac {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

// f(x) = [x1 x2 tanh(x2) + sech(x1); sech^2(x1 + x2) - sech^2(x2)]
Vec plant_f(std::span<const double> x);

// Zero before t_g, afterwards
// [2 x1^2 x2 + 2 sin(t) + 20; 2 x2^2 tanh(x1) + 2 cos(t/2) + 20].
Vec plant_g(std::span<const double> x, double t, double t_g);

// x_dot = f(x) + g(x, t) + u
struct PlantModel {
  std::function<Vec(std::span<const double>)> f;
  std::function<Vec(std::span<const double>, double)> g;  // empty when there is no disturbance

  Vec rate(std::span<const double> x, double t, std::span<const double> u) const;

  // Benchmark plant, with the sudden change switched on at t_g (kNever disables it).
  static PlantModel benchmark(double t_g = kNever);
};

struct Trajectory {
  std::function<Vec(double)> x_d;
  std::function<Vec(double)> x_d_dot;

  // x_d(t) = [sin(2t), -cos(t)]
  static Trajectory benchmark();

  // Largest |x_d_dot - central difference of x_d| over `samples` points of [0, t_end].
  double derivative_mismatch(double t_end, int samples = 200) const;
};

}  // namespace cnnac
