#pragma once

// Control law u = -phi_hat - k_s sgn(e) and the projected gradient weight
// adaptation law
//
//   tau         = -Gamma (A_c^{-1} J)^T e - rho ||e|| theta
//   theta_dot   = proj[tau]
//
// where J is the network Jacobian. proj keeps ||theta|| inside a ball of
// radius theta_bar (see projection()).

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "cnnac/jacobian.hpp"
#include "cnnac/mat.hpp"
#include "cnnac/network.hpp"

namespace cnnac {

// Width of the blend band used by the smooth projection, relative to theta_bar^2.
inline constexpr double kProjectionMargin = 1e-3;

enum class SgnMode { Exact, Smoothed };

// Diagonal learning-rate matrix: one rate for the fully connected block of
// theta, one for the conv block.
struct LearningRates {
  double fc = 1.0;
  double conv = 1.0;

  static LearningRates uniform(double g) { return {g, g}; }
  friend bool operator==(const LearningRates&, const LearningRates&) = default;
};

struct ControllerParams {
  double k_s = 1.0;
  Mat a_c;
  LearningRates gamma;
  double rho = 0.0;
  double theta_bar = 10.0;
  SgnMode sgn_mode = SgnMode::Exact;
  double sgn_epsilon = 1e-3;

  // Throws ConfigError unless A_c is Hurwitz, rates are positive, rho >= 0,
  // theta_bar > 0 and k_s > 0.
  void validate() const;
};

bool is_hurwitz(const Mat& a);
Mat inverse(const Mat& a);
double spectral_norm(const Mat& a);

Vec control_input(std::span<const double> phi_hat, std::span<const double> e, const ControllerParams& params);

// Smooth norm-ball projection. With ||theta||^2 = s and r = theta_bar:
//   c = clamp((s - r^2) / (margin r^2) + 1, 0, 1)
// and the outward radial part of tau is scaled by (1 - c) when theta^T tau > 0.
// c reaches 1 at the ball boundary, so the norm cannot grow past r in
// continuous time, and it ramps in linearly over r^2 (1 - margin) <= s <= r^2.
Vec projection(std::span<const double> theta, std::span<const double> tau, double theta_bar);
void project_in_place(std::span<const double> theta, std::span<double> tau, double theta_bar);

// Radially scales theta back onto the sphere of `radius` if it lies outside.
void clamp_to_ball(std::span<double> theta, double radius);

class AdaptationLaw {
 public:
  // fc_block_size: number of leading coordinates that use gamma.fc.
  AdaptationLaw(const ControllerParams& params, std::size_t fc_block_size);

  Vec raw_rate(std::span<const double> theta, const JacobianMatrix& jac, std::span<const double> e) const;
  Vec rate(std::span<const double> theta, const JacobianMatrix& jac, std::span<const double> e) const;

  // -Gamma (A_c^{-1} J)^T as a Xi x n matrix; the gradient term is this times e.
  Mat gradient_gain(const JacobianMatrix& jac) const;

  // Gradient term -Gamma (A_c^{-1} J)^T e only.
  Vec gradient_term(const JacobianMatrix& jac, std::span<const double> e) const;

  // rate() given a precomputed gradient term.
  Vec rate_from_gradient(std::span<const double> theta, std::span<const double> gradient,
                         std::span<const double> e) const;

  // Hard bound on ||theta|| after any integration step.
  double norm_limit() const { return params_.theta_bar * (1.0 + kProjectionMargin); }

  double gamma_at(std::size_t index) const { return index < fc_block_ ? params_.gamma.fc : params_.gamma.conv; }
  const ControllerParams& params() const { return params_; }

 private:
  ControllerParams params_;
  Mat a_c_inv_t_;
  std::size_t fc_block_;
};

// One explicit Euler step of proj[tau] followed by clamp_to_ball(norm_limit).
WeightVector adaptation_step(const WeightVector& theta, const JacobianMatrix& jac, std::span<const double> e,
                             const ControllerParams& params, std::size_t fc_block_size, double dt);

struct GainCertificate {
  bool computable = false;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double k_s_min = 0.0;
  double phi_prime_bound = 0.0;
  double delta_bar = 0.0;
  bool satisfied = false;

  // "yes", "no" or "not-computable (rho=0)".
  std::string verdict() const;
};

// beta1 = rho ||Gamma^{-1}||, beta2 = (Phi'_M (||A_c^{-1}|| + 1) + beta1 theta_bar) / (2 beta1),
// k_s_min = beta1 beta2^2 + delta_bar. Spectral norms throughout.
GainCertificate gain_certificate(const ControllerParams& params, double phi_prime_bound, double delta_bar,
                                 bool has_conv_block = true);

}  // namespace cnnac
