#include "cnnac/jacobian.hpp"

#include <algorithm>
#include <cmath>

#include "cnnac/errors.hpp"

namespace cnnac {

namespace {

void check_fresh(const ForwardTrace& trace, const NetworkWeights& w) {
  if (trace.fc_out.size() != w.fc.size() || trace.fc_in.size() != w.fc.size()) {
    throw LayoutError("jacobian: trace has a different layer count than the weights");
  }
  // Recompute the last layer; a trace produced from these weights agrees to rounding.
  const Mat& v = w.fc.back();
  const Vec& in = trace.fc_in.back();
  if (v.rows() != in.size() || v.cols() != trace.output.size()) {
    throw LayoutError("jacobian: trace shapes do not match the weights");
  }
  for (std::size_t c = 0; c < v.cols(); ++c) {
    double y = 0.0;
    for (std::size_t r = 0; r < v.rows(); ++r) {
      if (in[r] != 0.0) y += v(r, c) * in[r];
    }
    if (std::abs(y - trace.output[c]) > 1e-12 * (1.0 + std::abs(y))) {
      throw LayoutError("jacobian: stale trace, output does not match the weights");
    }
  }
}

}  // namespace

Mat augmented_tanh_derivative(std::span<const double> activated_with_one) {
  const std::size_t n = activated_with_one.size() - 1;
  Mat d(n + 1, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = activated_with_one[k];
    d(k, k) = 1.0 - a * a;
  }
  return d;
}

Mat fc_chain(const ForwardTrace& trace, const NetworkWeights& w, std::size_t first) {
  if (first == 0) throw LayoutError("fc_chain: the product starts at layer 1");
  Mat chain = Mat::identity(trace.output.size());
  for (std::size_t l = w.fc.size(); l-- > first;) {
    chain = chain * (w.fc[l].transposed() * augmented_tanh_derivative(trace.fc_in[l]));
  }
  return chain;
}

std::vector<Mat> fc_jacobians(const ForwardTrace& trace, const NetworkWeights& w) {
  check_fresh(trace, w);
  std::vector<Mat> blocks;
  for (std::size_t j = 0; j < w.fc.size(); ++j) {
    const std::size_t width = w.fc[j].cols();
    // vec(V_j) is row-major, so entry (r, c) sits at column r * width + c and
    // the selector is phi^T (x) I rather than I (x) phi^T.
    const Mat selector = kronecker(Mat::row_vector(trace.fc_in[j]), Mat::identity(width));
    blocks.push_back(fc_chain(trace, w, j + 1) * selector);
  }
  return blocks;
}

BackpropState conv_backprop_seed(const NetworkSpec& spec, const ForwardTrace& trace, const NetworkWeights& w) {
  check_fresh(trace, w);
  BackpropState st;
  st.d_concat = fc_chain(trace, w, 1) * w.fc.front().transposed();

  const std::size_t out_dim = trace.output.size();
  const std::size_t layers = spec.conv_layers.size();
  st.d_conv_out.assign(out_dim, std::vector<Mat>(layers));
  st.d_conv_in.assign(out_dim, std::vector<Mat>(layers));
  if (layers == 0) return st;

  const auto last = spec.conv_chain().back();
  for (std::size_t i = 0; i < out_dim; ++i) {
    // Drop the bias entry of C before reshaping.
    auto row = st.d_concat.row(i).first(last.rows * last.cols);
    st.d_conv_out[i][layers - 1] = reshape_columns(row, last.rows, last.cols);
  }
  return st;
}

void conv_layer_backprop(BackpropState& state, const ForwardTrace& trace, const NetworkWeights& w,
                         std::size_t layer) {
  const auto& filters = w.filters.at(layer);
  const Mat& below = trace.conv_in.at(layer);
  const std::size_t p = filters.front().rows();
  const std::size_t m = below.cols();

  for (std::size_t i = 0; i < state.d_conv_out.size(); ++i) {
    const Mat& g = state.d_conv_out[i][layer];
    Mat d_in(below.rows(), below.cols());
    for (std::size_t li = 0; li < g.rows(); ++li) {
      for (std::size_t lj = 0; lj < g.cols(); ++lj) {
        const double s = g(li, lj);
        if (s == 0.0) continue;
        // filter lj placed at row offset li
        const Mat& f = filters[lj];
        for (std::size_t r = 0; r < p; ++r)
          for (std::size_t c = 0; c < m; ++c) d_in(li + r, c) += s * f(r, c);
      }
    }
    if (layer > 0) {
      Mat act_deriv(below.rows(), below.cols());
      auto a = below.data();
      auto d = act_deriv.data();
      for (std::size_t k = 0; k < a.size(); ++k) d[k] = 1.0 - a[k] * a[k];
      state.d_conv_out[i][layer - 1] = hadamard(d_in, act_deriv);
    }
    state.d_conv_in[i][layer] = std::move(d_in);
  }
}

ConvLayerGrads conv_weight_jacobians(const BackpropState& state, const ForwardTrace& trace,
                                     const NetworkSpec& spec, std::size_t layer) {
  const auto& c = spec.conv_layers.at(layer);
  const Mat& act = trace.conv_in.at(layer);
  ConvLayerGrads out;
  for (std::size_t i = 0; i < state.d_conv_out.size(); ++i) {
    const Mat& g = state.d_conv_out[i][layer];
    std::vector<Mat> fgrads(c.filter_count, Mat(c.filter_rows, c.filter_cols));
    Vec bgrads(c.filter_count, 0.0);
    for (std::size_t lk = 0; lk < c.filter_count; ++lk) {
      for (std::size_t li = 0; li < g.rows(); ++li) {
        const double s = g(li, lk);
        bgrads[lk] += s;
        if (s == 0.0) continue;
        fgrads[lk] += s * row_slice(act, li + 1, li + c.filter_rows);
      }
    }
    out.filters.push_back(std::move(fgrads));
    out.biases.push_back(std::move(bgrads));
  }
  return out;
}

JacobianMatrix assemble_full_jacobian(const NetworkSpec& spec, const ForwardTrace& trace,
                                      const NetworkWeights& w) {
  const WeightLayout layout(spec);
  const std::size_t out_dim = trace.output.size();
  if (out_dim != spec.output_dim()) throw LayoutError("assemble_full_jacobian: output dim mismatch");
  Mat jac(out_dim, layout.size());

  const auto fc = fc_jacobians(trace, w);
  for (std::size_t j = 0; j < fc.size(); ++j) {
    const std::size_t off = layout.fc_offset(j);
    if (fc[j].cols() != layout.fc_shape(j).rows * layout.fc_shape(j).cols) {
      throw LayoutError("assemble_full_jacobian: fc block width mismatch");
    }
    for (std::size_t i = 0; i < out_dim; ++i)
      for (std::size_t k = 0; k < fc[j].cols(); ++k) jac(i, off + k) = fc[j](i, k);
  }

  if (!spec.dnn_mode()) {
    BackpropState st = conv_backprop_seed(spec, trace, w);
    for (std::size_t layer = spec.conv_layers.size(); layer-- > 0;) {
      conv_layer_backprop(st, trace, w, layer);
      const auto grads = conv_weight_jacobians(st, trace, spec, layer);
      const auto& c = spec.conv_layers[layer];
      for (std::size_t i = 0; i < out_dim; ++i) {
        for (std::size_t k = 0; k < c.filter_count; ++k) {
          auto src = grads.filters[i][k].data();
          std::copy(src.begin(), src.end(),
                    jac.data().begin() + static_cast<std::ptrdiff_t>(i * layout.size() + layout.filter_offset(layer, k)));
          jac(i, layout.bias_offset(layer) + k) = grads.biases[i][k];
        }
      }
    }
  }
  return {std::move(jac)};
}

JacobianMatrix assemble_full_jacobian(const NetworkSpec& spec, const ForwardTrace& trace,
                                      std::span<const double> theta) {
  return assemble_full_jacobian(spec, trace, unpack_weights(spec, theta));
}

}  // namespace cnnac
