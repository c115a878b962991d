#include "cnnac/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "cnnac/errors.hpp"

namespace cnnac {

namespace {

Eigen::MatrixXd to_eigen(const Mat& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
  return m;
}

Mat from_eigen(const Eigen::MatrixXd& m) {
  Mat a(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a(r, c) = m(r, c);
  return a;
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

bool is_hurwitz(const Mat& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) return false;
  const Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a), false);
  if (es.info() != Eigen::Success) return false;
  return (es.eigenvalues().real().array() < 0.0).all();
}

Mat inverse(const Mat& a) {
  if (a.rows() != a.cols()) throw ShapeError("inverse: matrix is not square");
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(to_eigen(a));
  if (!lu.isInvertible()) throw ConfigError("inverse: matrix is singular");
  return from_eigen(lu.inverse());
}

double spectral_norm(const Mat& a) {
  if (a.empty()) return 0.0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  return svd.singularValues()(0);
}

void ControllerParams::validate() const {
  if (!(k_s > 0.0)) throw ConfigError("controller: k_s must be positive");
  if (!(rho >= 0.0)) throw ConfigError("controller: rho must be nonnegative");
  if (!(theta_bar > 0.0)) throw ConfigError("controller: theta_bar must be positive");
  if (!(gamma.fc > 0.0) || !(gamma.conv > 0.0)) throw ConfigError("controller: learning rates must be positive");
  if (sgn_mode == SgnMode::Smoothed && !(sgn_epsilon > 0.0)) {
    throw ConfigError("controller: smoothed sgn needs a positive epsilon");
  }
  if (!is_hurwitz(a_c)) throw ConfigError("controller: A_c is not Hurwitz");
}

Vec control_input(std::span<const double> phi_hat, std::span<const double> e, const ControllerParams& params) {
  if (phi_hat.size() != e.size()) throw ShapeError("control_input: phi_hat and e differ in length");
  Vec u(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double s = params.sgn_mode == SgnMode::Exact ? sgn(e[k]) : std::tanh(e[k] / params.sgn_epsilon);
    u[k] = -phi_hat[k] - params.k_s * s;
  }
  return u;
}

void project_in_place(std::span<const double> theta, std::span<double> tau, double theta_bar) {
  if (theta.size() != tau.size()) throw ShapeError("projection: theta and tau differ in length");
  const double s = dot(theta, theta);
  const double r2 = theta_bar * theta_bar;
  const double c = std::clamp((s - r2) / (kProjectionMargin * r2) + 1.0, 0.0, 1.0);
  if (c <= 0.0 || s == 0.0) return;
  const double outward = dot(theta, tau);
  if (outward <= 0.0) return;
  const double k = c * outward / s;
  for (std::size_t i = 0; i < tau.size(); ++i) tau[i] -= k * theta[i];
}

Vec projection(std::span<const double> theta, std::span<const double> tau, double theta_bar) {
  Vec out(tau.begin(), tau.end());
  project_in_place(theta, out, theta_bar);
  return out;
}

void clamp_to_ball(std::span<double> theta, double radius) {
  const double n = norm2(theta);
  if (n <= radius) return;
  // Round the scale down so rounding cannot leave the norm just above radius.
  const double scale = std::nextafter(radius / n, 0.0) * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
  for (double& v : theta) v *= scale;
}

AdaptationLaw::AdaptationLaw(const ControllerParams& params, std::size_t fc_block_size)
    : params_(params), fc_block_(fc_block_size) {
  params_.validate();
  a_c_inv_t_ = inverse(params_.a_c).transposed();
}

Mat AdaptationLaw::gradient_gain(const JacobianMatrix& jac) const {
  if (jac.rows() != a_c_inv_t_.rows()) throw ShapeError("adaptation: Jacobian rows do not match A_c");
  // (A^{-1} J)^T = J^T A^{-T}
  Mat gain = jac.matrix.transposed() * a_c_inv_t_;
  for (std::size_t k = 0; k < gain.rows(); ++k)
    for (std::size_t i = 0; i < gain.cols(); ++i) gain(k, i) *= -gamma_at(k);
  return gain;
}

Vec AdaptationLaw::gradient_term(const JacobianMatrix& jac, std::span<const double> e) const {
  if (e.size() != jac.rows() || e.size() != a_c_inv_t_.rows()) {
    throw ShapeError("adaptation: e length does not match the Jacobian / A_c");
  }
  // (A^{-1} J)^T e = J^T (A^{-T} e)
  const Vec w = a_c_inv_t_ * e;
  Vec g(jac.cols(), 0.0);
  for (std::size_t i = 0; i < jac.rows(); ++i) {
    auto row = jac.matrix.row(i);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += row[k] * w[i];
  }
  for (std::size_t k = 0; k < g.size(); ++k) g[k] *= -gamma_at(k);
  return g;
}

Vec AdaptationLaw::rate_from_gradient(std::span<const double> theta, std::span<const double> gradient,
                                      std::span<const double> e) const {
  if (theta.size() != gradient.size()) throw ShapeError("adaptation: theta and Jacobian widths differ");
  const double damping = params_.rho * norm2(e);
  Vec tau(gradient.begin(), gradient.end());
  if (damping != 0.0) {
    for (std::size_t k = 0; k < tau.size(); ++k) tau[k] -= damping * theta[k];
  }
  project_in_place(theta, tau, params_.theta_bar);
  return tau;
}

Vec AdaptationLaw::raw_rate(std::span<const double> theta, const JacobianMatrix& jac,
                            std::span<const double> e) const {
  Vec tau = gradient_term(jac, e);
  if (theta.size() != tau.size()) throw ShapeError("adaptation: theta and Jacobian widths differ");
  const double damping = params_.rho * norm2(e);
  for (std::size_t k = 0; k < tau.size(); ++k) tau[k] -= damping * theta[k];
  return tau;
}

Vec AdaptationLaw::rate(std::span<const double> theta, const JacobianMatrix& jac, std::span<const double> e) const {
  return rate_from_gradient(theta, gradient_term(jac, e), e);
}

WeightVector adaptation_step(const WeightVector& theta, const JacobianMatrix& jac, std::span<const double> e,
                             const ControllerParams& params, std::size_t fc_block_size, double dt) {
  if (!(dt > 0.0)) throw ConfigError("adaptation_step: dt must be positive");
  const AdaptationLaw law(params, fc_block_size);
  const Vec rate = law.rate(theta.theta, jac, e);
  WeightVector next = theta;
  for (std::size_t k = 0; k < rate.size(); ++k) next.theta[k] += dt * rate[k];
  clamp_to_ball(next.theta, law.norm_limit());
  return next;
}

std::string GainCertificate::verdict() const {
  if (!computable) return "not-computable (rho=0)";
  return satisfied ? "yes" : "no";
}

GainCertificate gain_certificate(const ControllerParams& params, double phi_prime_bound, double delta_bar,
                                 bool has_conv_block) {
  GainCertificate cert;
  cert.phi_prime_bound = phi_prime_bound;
  cert.delta_bar = delta_bar;
  if (!(params.rho > 0.0)) return cert;

  // Gamma is diagonal, so ||Gamma^{-1}|| is the reciprocal of the smallest rate.
  const double min_rate = has_conv_block ? std::min(params.gamma.fc, params.gamma.conv) : params.gamma.fc;
  cert.computable = true;
  cert.beta1 = params.rho / min_rate;
  cert.beta2 = (phi_prime_bound * (spectral_norm(inverse(params.a_c)) + 1.0) + cert.beta1 * params.theta_bar) /
               (2.0 * cert.beta1);
  cert.k_s_min = cert.beta1 * cert.beta2 * cert.beta2 + delta_bar;
  cert.satisfied = params.k_s >= cert.k_s_min;
  return cert;
}

}  // namespace cnnac
