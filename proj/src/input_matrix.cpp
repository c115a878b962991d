#include "cnnac/input_matrix.hpp"

#include <cmath>

#include "cnnac/errors.hpp"

namespace cnnac {

Vec make_xi(std::span<const double> e, std::span<const double> x, std::span<const double> u, double alpha2) {
  Vec xi;
  xi.reserve(e.size() + x.size() + u.size());
  for (double v : e) xi.push_back(alpha2 * v);
  for (double v : x) xi.push_back(alpha2 * v);
  for (double v : u) xi.push_back(alpha2 * v);
  return xi;
}

HistoryBuffer::HistoryBuffer(std::size_t capacity, double sample_dt) : slots_(capacity), dt_(sample_dt) {
  if (capacity == 0) throw ConfigError("HistoryBuffer: capacity must be positive");
  if (!(sample_dt > 0.0)) throw ConfigError("HistoryBuffer: sample_dt must be positive");
}

HistoryBuffer HistoryBuffer::for_network(const NetworkSpec& spec, double stacking_time, double sample_dt) {
  const auto stride = static_cast<std::size_t>(std::llround(stacking_time / sample_dt));
  return HistoryBuffer((spec.input_rows - 1) * stride + 1, sample_dt);
}

void HistoryBuffer::push(double t, Vec xi) {
  if (count_ > 0 && std::abs((t - latest_t_) - dt_) > 1e-6 * dt_ + 1e-12) {
    throw ConfigError("HistoryBuffer: samples must be spaced by sample_dt");
  }
  head_ = count_ == 0 ? 0 : (head_ + 1) % slots_.size();
  slots_[head_] = std::move(xi);
  if (count_ < slots_.size()) ++count_;
  latest_t_ = t;
}

const Vec* HistoryBuffer::nearest(double t) const {
  if (count_ == 0) return nullptr;
  const long long back = std::llround((latest_t_ - t) / dt_);
  if (back < 0 || back >= static_cast<long long>(count_)) return nullptr;
  const std::size_t n = slots_.size();
  return &slots_[(head_ + n - static_cast<std::size_t>(back)) % n];
}

Mat build_input_matrix(const HistoryBuffer& buffer, double t, const NetworkSpec& spec, double stacking_time) {
  Mat x(spec.input_rows, spec.input_cols);
  for (std::size_t k = 0; k < spec.input_rows; ++k) {
    const Vec* xi = buffer.nearest(t - static_cast<double>(k) * stacking_time);
    if (xi == nullptr) continue;
    if (xi->size() != spec.input_cols) {
      throw ConfigError("build_input_matrix: sample length " + std::to_string(xi->size()) +
                        " != input width " + std::to_string(spec.input_cols));
    }
    for (std::size_t c = 0; c < spec.input_cols; ++c) x(k, c) = (*xi)[c];
  }
  return x;
}

}  // namespace cnnac
