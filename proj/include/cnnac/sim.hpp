#pragma once

// Fixed-step closed-loop simulation of the adaptive controller.
//
// Each step at t_k:
//   1. e = x - x_d(t_k), xi = alpha2 [e; x; u_prev] is appended to the history.
//   2. X is assembled from the history, the network and its Jacobian are
//      evaluated, and u = -phi_hat - k_s sgn(e) is formed.
//   3. [x; theta] is advanced over [t_k, t_k + dt] by RK4 with u and the
//      Jacobian held (zero-order hold).
//
// The e-modification term makes the weight dynamics stiff while ||e|| is
// large (rate rho ||e||), so step 3 splits the interval into equal RK4
// substeps whenever dt * rho ||e|| would leave RK4's stability region. Once
// ||e|| is small this is a single RK4 step.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnnac/controller.hpp"
#include "cnnac/mat.hpp"
#include "cnnac/network.hpp"
#include "cnnac/plant.hpp"

namespace cnnac {

enum class Feedforward {
  Network,  // phi_hat from the adapted network
  Oracle,   // phi_hat replaced by the true lumped term (test harness only)
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  std::uint64_t seed = 1;
  double init_low = -0.1;
  double init_high = 0.1;
  Feedforward feedforward = Feedforward::Network;
  // dt * rho ||e|| allowed per RK4 substep.
  double stiffness_step = 1.0;
  std::size_t max_substeps = 200000;
};

struct PlantConfig {
  Vec x0{1.0, 2.0};
  double t_g = kNever;  // onset of the sudden change
};

struct OutputConfig {
  std::string prefix;      // file name stem, defaults to the scenario name
  double window_start = 0.0;
  double window_end = kNever;  // RMSE window; kNever means t_end
};

struct Scenario {
  std::string name = "custom";
  PlantConfig plant;
  ControllerParams controller;
  NetworkSpec network;
  double stacking_time = 0.1;  // T_s
  SimConfig sim;
  OutputConfig output;
  double delta_bar = 0.0;  // lumped-error bound used by the gain certificate

  // Cross-field checks: dimension chain, Hurwitz A_c, T_s a multiple of dt,
  // input width = 3 * state dimension, output dim = state dimension.
  void validate() const;
};

struct Sample {
  double t = 0.0;
  Vec x, x_d, e, u, phi_hat;
  double theta_norm = 0.0;
};

struct RunResult {
  std::string name;
  std::vector<Sample> samples;
  Vec rmse;                       // over the configured window
  std::optional<Vec> post_change;  // over [t_g, t_end] when a sudden change is configured
  double max_theta_norm = 0.0;
  double max_jacobian_norm = 0.0;  // measured Phi'_M
  std::size_t weight_count = 0;
  std::size_t total_substeps = 0;
  double dt = 0.0;
  double t_g = kNever;
  double theta_bar = 0.0;
};

// Root mean square of each component of e over samples with t in [t0, t1].
Vec rmse(std::span<const Sample> samples, double t0, double t1);

// Initial weights: every coordinate drawn from U(init_low, init_high).
Vec initial_weights(const NetworkSpec& spec, const SimConfig& sim);

// f_c(x) - x_d_dot + A_c x_d with the plant's true f (and g after t_g).
Vec true_lumped_term(const PlantModel& plant, const Trajectory& traj, const Mat& a_c, std::span<const double> x,
                     double t);

RunResult simulate(const Scenario& scenario);

// Advance [x; theta] by one RK4 step of size h with u and the Jacobian held.
// `gradient_gain` is AdaptationLaw::gradient_gain of the held Jacobian; with
// law == nullptr theta is left untouched. Exposed for tests.
void coupled_rk4_step(const PlantModel& plant, const Trajectory& traj, const AdaptationLaw* law,
                      const Mat& gradient_gain, std::span<double> x, std::span<double> theta,
                      std::span<const double> u, double t, double h);

}  // namespace cnnac
