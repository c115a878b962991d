#include "cnnac/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cnnac/errors.hpp"
#include "cnnac/input_matrix.hpp"
#include "cnnac/jacobian.hpp"
#include "cnnac/rng.hpp"

namespace cnnac {

namespace {

bool is_multiple(double value, double step) {
  const double ratio = value / step;
  return std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio) && std::round(ratio) >= 1.0;
}

Vec subtract(std::span<const double> a, std::span<const double> b) {
  Vec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

std::string dump_state(double t, std::span<const double> x, std::span<const double> u, double theta_norm) {
  std::ostringstream os;
  os << "closed loop diverged at t=" << t << ": x=[";
  for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << "] u=[";
  for (std::size_t k = 0; k < u.size(); ++k) os << (k ? ", " : "") << u[k];
  os << "] |theta|=" << theta_norm;
  return os.str();
}

}  // namespace

void Scenario::validate() const {
  network.validate();
  controller.validate();
  const std::size_t n = plant.x0.size();
  if (n == 0) throw ConfigError("plant: x0 must be non-empty");
  if (controller.a_c.rows() != n) {
    throw ConfigError("controller: A_c is " + std::to_string(controller.a_c.rows()) + "x" +
                      std::to_string(controller.a_c.cols()) + " but the state has " + std::to_string(n) +
                      " entries");
  }
  if (network.input_cols != 3 * n) {
    throw ConfigError("network: input width " + std::to_string(network.input_cols) + " != 3 * state dimension " +
                      std::to_string(3 * n));
  }
  if (network.output_dim() != n) {
    throw ConfigError("network: output width " + std::to_string(network.output_dim()) +
                      " != state dimension " + std::to_string(n));
  }
  if (!(sim.dt > 0.0)) throw ConfigError("sim: dt must be positive");
  if (!(sim.t_end > 0.0)) throw ConfigError("sim: t_end must be positive");
  if (!(sim.init_low < sim.init_high)) throw ConfigError("sim: init range is empty");
  if (!(sim.stiffness_step > 0.0)) throw ConfigError("sim: stiffness_step must be positive");
  if (!(stacking_time > 0.0) || !is_multiple(stacking_time, sim.dt)) {
    throw ConfigError("network: stacking_time must be a positive integer multiple of dt");
  }
  if (plant.t_g < 0.0) throw ConfigError("plant: t_g must be nonnegative");
  if (!(output.window_start >= 0.0) || !(output.window_start < std::min(output.window_end, sim.t_end))) {
    throw ConfigError("output: RMSE window is empty");
  }
}

Vec rmse(std::span<const Sample> samples, double t0, double t1) {
  constexpr double slack = 1e-9;
  Vec acc;
  std::size_t count = 0;
  for (const auto& s : samples) {
    if (s.t < t0 - slack || s.t > t1 + slack) continue;
    if (acc.empty()) acc.assign(s.e.size(), 0.0);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += s.e[k] * s.e[k];
    ++count;
  }
  if (count == 0) throw ConfigError("rmse: no samples in the window");
  for (double& v : acc) v = std::sqrt(v / static_cast<double>(count));
  return acc;
}

Vec initial_weights(const NetworkSpec& spec, const SimConfig& sim) {
  UniformSource rng(sim.seed);
  Vec theta(spec.weight_count());
  for (double& v : theta) v = rng.uniform(sim.init_low, sim.init_high);
  return theta;
}

Vec true_lumped_term(const PlantModel& plant, const Trajectory& traj, const Mat& a_c, std::span<const double> x,
                     double t) {
  // f_c(x) - x_d_dot + A_c x_d = f(x) + g(x, t) - x_d_dot - A_c e
  const Vec zero(x.size(), 0.0);
  Vec lambda = plant.rate(x, t, zero);
  const Vec xd_dot = traj.x_d_dot(t);
  const Vec e = subtract(x, traj.x_d(t));
  const Vec ae = a_c * e;
  for (std::size_t k = 0; k < lambda.size(); ++k) lambda[k] -= xd_dot[k] + ae[k];
  return lambda;
}

void coupled_rk4_step(const PlantModel& plant, const Trajectory& traj, const AdaptationLaw* law,
                      const Mat& gradient_gain, std::span<double> x, std::span<double> theta,
                      std::span<const double> u, double t, double h) {
  const std::size_t n = x.size();
  const std::size_t m = law ? theta.size() : 0;
  if (law && (gradient_gain.rows() != m || gradient_gain.cols() != n)) {
    throw ShapeError("coupled_rk4_step: gradient gain has the wrong shape");
  }
  const double rho = law ? law->params().rho : 0.0;
  const double theta_bar = law ? law->params().theta_bar : 0.0;

  // Allocation-free weight rate: proj[K e - rho |e| theta].
  Vec e(n);
  auto theta_rate = [&](double tau, std::span<const double> xs, std::span<const double> ths, Vec& out) {
    const Vec xd = traj.x_d(tau);
    for (std::size_t i = 0; i < n; ++i) e[i] = xs[i] - xd[i];
    const double damping = rho * norm2(e);
    auto g = gradient_gain.data();
    for (std::size_t k = 0; k < m; ++k) {
      double v = -damping * ths[k];
      for (std::size_t i = 0; i < n; ++i) v += g[k * n + i] * e[i];
      out[k] = v;
    }
    project_in_place(ths, out, theta_bar);
  };

  Vec k1x, k2x, k3x, k4x;
  Vec k1t(m), k2t(m), k3t(m), k4t(m);
  Vec xs(n), ts(m);
  auto stage = [&](const Vec& dx, const Vec& dth, double a) {
    for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + a * dx[i];
    for (std::size_t i = 0; i < m; ++i) ts[i] = theta[i] + a * dth[i];
  };

  k1x = plant.rate(x, t, u);
  if (m) theta_rate(t, x, theta, k1t);
  stage(k1x, k1t, 0.5 * h);
  k2x = plant.rate(xs, t + 0.5 * h, u);
  if (m) theta_rate(t + 0.5 * h, xs, ts, k2t);
  stage(k2x, k2t, 0.5 * h);
  k3x = plant.rate(xs, t + 0.5 * h, u);
  if (m) theta_rate(t + 0.5 * h, xs, ts, k3t);
  stage(k3x, k3t, h);
  k4x = plant.rate(xs, t + h, u);
  if (m) theta_rate(t + h, xs, ts, k4t);

  for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
  if (m == 0) return;
  for (std::size_t i = 0; i < m; ++i) theta[i] += h / 6.0 * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i]);
  clamp_to_ball(theta, law->norm_limit());
}

RunResult simulate(const Scenario& sc) {
  sc.validate();
  const PlantModel plant = PlantModel::benchmark(sc.plant.t_g);
  const Trajectory traj = Trajectory::benchmark();
  if (traj.x_d_dot && traj.derivative_mismatch(sc.sim.t_end) > 1e-6) {
    throw ConfigError("trajectory: x_d_dot is not the derivative of x_d");
  }

  const NetworkSpec& spec = sc.network;
  const WeightLayout layout(spec);
  const AdaptationLaw law(sc.controller, layout.fc_block_size());
  const bool use_network = sc.sim.feedforward == Feedforward::Network;
  const double dt = sc.sim.dt;
  const auto steps = static_cast<std::size_t>(std::llround(sc.sim.t_end / dt));

  Vec theta = initial_weights(spec, sc.sim);
  HistoryBuffer history = HistoryBuffer::for_network(spec, sc.stacking_time, dt);
  Vec x = sc.plant.x0;
  Vec u_prev(x.size(), 0.0);

  RunResult res;
  res.name = sc.name;
  res.weight_count = layout.size();
  res.dt = dt;
  res.t_g = sc.plant.t_g;
  res.theta_bar = sc.controller.theta_bar;
  res.samples.reserve(steps + 1);

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec xd = traj.x_d(t);
    const Vec e = subtract(x, xd);

    Vec phi_hat;
    JacobianMatrix jac;
    if (use_network) {
      history.push(t, make_xi(e, x, u_prev, spec.alpha2));
      const Mat input = build_input_matrix(history, t, spec, sc.stacking_time);
      const NetworkWeights w = unpack_weights(spec, theta);
      const ForwardTrace trace = forward(spec, w, input);
      phi_hat = trace.output;
      jac = assemble_full_jacobian(spec, trace, w);
      const double jn = std::sqrt(spectral_norm(jac.matrix * jac.matrix.transposed()));
      res.max_jacobian_norm = std::max(res.max_jacobian_norm, jn);
    } else {
      phi_hat = true_lumped_term(plant, traj, sc.controller.a_c, x, t);
    }
    const Vec u = control_input(phi_hat, e, sc.controller);

    const double theta_norm = norm2(theta);
    res.max_theta_norm = std::max(res.max_theta_norm, theta_norm);
    res.samples.push_back({t, x, xd, e, u, phi_hat, theta_norm});
    if (!all_finite(u) || !all_finite(phi_hat)) throw DivergenceError(dump_state(t, x, u, theta_norm), t);
    if (k == steps) break;

    std::size_t substeps = 1;
    Mat gain;
    if (use_network) {
      gain = law.gradient_gain(jac);
      const double stiffness = dt * sc.controller.rho * norm2(e);
      substeps = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(stiffness / sc.sim.stiffness_step)), 1,
                                         sc.sim.max_substeps);
    }
    const double h = dt / static_cast<double>(substeps);
    for (std::size_t s = 0; s < substeps; ++s) {
      coupled_rk4_step(plant, traj, use_network ? &law : nullptr, gain, x, theta, u,
                       t + static_cast<double>(s) * h, h);
    }
    res.total_substeps += substeps;
    if (!all_finite(x) || !all_finite(theta)) throw DivergenceError(dump_state(t + dt, x, u, norm2(theta)), t + dt);
    u_prev = u;
  }

  const double t1 = std::min(sc.output.window_end, sc.sim.t_end);
  res.rmse = rmse(res.samples, sc.output.window_start, t1);
  if (std::isfinite(sc.plant.t_g) && sc.plant.t_g < sc.sim.t_end) {
    res.post_change = rmse(res.samples, sc.plant.t_g, sc.sim.t_end);
  }
  return res;
}

}  // namespace cnnac
