#include "cnnac/plant.hpp"

#include <algorithm>
#include <cmath>

#include "cnnac/errors.hpp"

namespace cnnac {

namespace {

double sech(double v) { return 1.0 / std::cosh(v); }
double sech2(double v) {
  const double s = sech(v);
  return s * s;
}

}  // namespace

Vec plant_f(std::span<const double> x) {
  if (x.size() != 2) throw ShapeError("plant_f: state must have 2 entries");
  const double x1 = x[0];
  const double x2 = x[1];
  return {x1 * x2 * std::tanh(x2) + sech(x1), sech2(x1 + x2) - sech2(x2)};
}

Vec plant_g(std::span<const double> x, double t, double t_g) {
  if (x.size() != 2) throw ShapeError("plant_g: state must have 2 entries");
  if (t < t_g) return {0.0, 0.0};
  const double x1 = x[0];
  const double x2 = x[1];
  return {2.0 * x1 * x1 * x2 + 2.0 * std::sin(t) + 20.0,
          2.0 * x2 * x2 * std::tanh(x1) + 2.0 * std::cos(0.5 * t) + 20.0};
}

Vec PlantModel::rate(std::span<const double> x, double t, std::span<const double> u) const {
  Vec dx = f(x);
  if (dx.size() != u.size()) throw ShapeError("plant: u has the wrong length");
  if (g) {
    const Vec d = g(x, t);
    for (std::size_t k = 0; k < dx.size(); ++k) dx[k] += d[k];
  }
  for (std::size_t k = 0; k < dx.size(); ++k) dx[k] += u[k];
  return dx;
}

PlantModel PlantModel::benchmark(double t_g) {
  PlantModel p;
  p.f = [](std::span<const double> x) { return plant_f(x); };
  if (std::isfinite(t_g)) {
    p.g = [t_g](std::span<const double> x, double t) { return plant_g(x, t, t_g); };
  }
  return p;
}

Trajectory Trajectory::benchmark() {
  Trajectory tr;
  tr.x_d = [](double t) { return Vec{std::sin(2.0 * t), -std::cos(t)}; };
  tr.x_d_dot = [](double t) { return Vec{2.0 * std::cos(2.0 * t), std::sin(t)}; };
  return tr;
}

double Trajectory::derivative_mismatch(double t_end, int samples) const {
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = t_end * k / samples;
    const Vec hi = x_d(t + h);
    const Vec lo = x_d(t - h);
    const Vec d = x_d_dot(t);
    for (std::size_t i = 0; i < d.size(); ++i) {
      worst = std::max(worst, std::abs((hi[i] - lo[i]) / (2.0 * h) - d[i]));
    }
  }
  return worst;
}

}  // namespace cnnac
