#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cnnac/mat.hpp"
#include "cnnac/network.hpp"

namespace cnnac {

// xi = alpha2 * [e; x; u]. `u` is the input applied on the previous step.
Vec make_xi(std::span<const double> e, std::span<const double> x, std::span<const double> u, double alpha2);

// Fixed-capacity ring buffer of xi samples recorded at a uniform rate.
class HistoryBuffer {
 public:
  HistoryBuffer(std::size_t capacity, double sample_dt);

  // Capacity large enough to look back (n0 - 1) * stacking_time.
  static HistoryBuffer for_network(const NetworkSpec& spec, double stacking_time, double sample_dt);

  // Samples must arrive in time order, one per sample_dt.
  void push(double t, Vec xi);

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return slots_.size(); }
  double sample_dt() const { return dt_; }
  double latest_time() const { return latest_t_; }

  // Stored sample nearest to `t`, or nullptr if `t` predates the buffer or
  // lies in the future.
  const Vec* nearest(double t) const;

 private:
  std::vector<Vec> slots_;
  std::size_t head_ = 0;  // index of the newest sample
  std::size_t count_ = 0;
  double dt_;
  double latest_t_ = 0.0;
};

// X(t) = [xi(t), xi(t - Ts), ..., xi(t - (n0-1) Ts)]^T; rows with no stored
// sample are zero.
Mat build_input_matrix(const HistoryBuffer& buffer, double t, const NetworkSpec& spec, double stacking_time);

}  // namespace cnnac
