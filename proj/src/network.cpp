#include "cnnac/network.hpp"

#include <cmath>
#include <sstream>

#include "cnnac/errors.hpp"

namespace cnnac {

void NetworkSpec::validate() const {
  if (input_rows == 0 || input_cols == 0) throw ConfigError("network: input matrix must be non-empty");
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw ConfigError("network: alpha1 and alpha2 must be positive");
  if (fc_widths.empty()) throw ConfigError("network: at least one fully connected layer is required");
  for (std::size_t j = 0; j < fc_widths.size(); ++j) {
    if (fc_widths[j] == 0) throw ConfigError("network: fc layer " + std::to_string(j) + " has zero width");
  }
  std::size_t rows = input_rows;
  std::size_t cols = input_cols;
  for (std::size_t j = 0; j < conv_layers.size(); ++j) {
    const auto& c = conv_layers[j];
    const std::string where = "network: conv layer " + std::to_string(j) + ": ";
    if (c.filter_rows == 0 || c.filter_count == 0) throw ConfigError(where + "empty filter set");
    if (c.filter_cols != cols) {
      throw ConfigError(where + "filter width " + std::to_string(c.filter_cols) +
                        " != input width " + std::to_string(cols));
    }
    if (c.filter_rows > rows) {
      throw ConfigError(where + "filter height " + std::to_string(c.filter_rows) +
                        " exceeds input height " + std::to_string(rows));
    }
    rows = rows - c.filter_rows + 1;
    cols = c.filter_count;
  }
}

std::vector<LayerDims> NetworkSpec::conv_chain() const {
  std::vector<LayerDims> chain;
  chain.push_back({input_rows, input_cols});
  for (const auto& c : conv_layers) {
    const auto& prev = chain.back();
    chain.push_back({prev.rows - c.filter_rows + 1, c.filter_count});
  }
  return chain;
}

std::size_t NetworkSpec::concat_length() const {
  const auto last = conv_chain().back();
  return last.rows * last.cols + 1;
}

std::size_t NetworkSpec::weight_count() const { return WeightLayout(*this).size(); }

WeightLayout::WeightLayout(const NetworkSpec& spec) : conv_(spec.conv_layers) {
  spec.validate();
  std::size_t offset = 0;
  std::size_t in = spec.concat_length() - 1;
  for (std::size_t width : spec.fc_widths) {
    fc_offsets_.push_back(offset);
    fc_shapes_.push_back({in + 1, width});
    offset += (in + 1) * width;
    in = width;
  }
  fc_block_ = offset;
  for (const auto& c : spec.conv_layers) {
    std::vector<std::size_t> layer;
    for (std::size_t k = 0; k < c.filter_count; ++k) {
      layer.push_back(offset);
      offset += c.filter_rows * c.filter_cols;
    }
    filter_offsets_.push_back(std::move(layer));
  }
  for (const auto& c : spec.conv_layers) {
    bias_offsets_.push_back(offset);
    offset += c.filter_count;
  }
  size_ = offset;
}

std::string WeightLayout::describe(std::size_t index) const {
  std::ostringstream os;
  if (index >= size_) return "out-of-range";
  for (std::size_t j = fc_offsets_.size(); j-- > 0;) {
    if (index >= fc_offsets_[j] && index < fc_block_) {
      const std::size_t local = index - fc_offsets_[j];
      os << "V" << j << "[" << local / fc_shapes_[j].cols + 1 << "," << local % fc_shapes_[j].cols + 1 << "]";
      return os.str();
    }
  }
  for (std::size_t j = bias_offsets_.size(); j-- > 0;) {
    if (index >= bias_offsets_[j]) {
      os << "B" << j << "[" << index - bias_offsets_[j] + 1 << "]";
      return os.str();
    }
  }
  for (std::size_t j = filter_offsets_.size(); j-- > 0;) {
    for (std::size_t k = filter_offsets_[j].size(); k-- > 0;) {
      if (index >= filter_offsets_[j][k]) {
        const std::size_t local = index - filter_offsets_[j][k];
        const std::size_t m = conv_[j].filter_cols;
        os << "W" << j << "^" << k + 1 << "[" << local / m + 1 << "," << local % m + 1 << "]";
        return os.str();
      }
    }
  }
  return "unknown";
}

NetworkWeights unpack_weights(const NetworkSpec& spec, std::span<const double> theta) {
  const WeightLayout layout(spec);
  if (theta.size() != layout.size()) {
    throw LayoutError("unpack_weights: theta has " + std::to_string(theta.size()) +
                      " entries, layout expects " + std::to_string(layout.size()));
  }
  NetworkWeights w;
  for (std::size_t j = 0; j < layout.fc_layer_count(); ++j) {
    const auto s = layout.fc_shape(j);
    w.fc.push_back(Mat::from_rowmajor(s.rows, s.cols, theta.subspan(layout.fc_offset(j), s.rows * s.cols)));
  }
  for (std::size_t j = 0; j < spec.conv_layers.size(); ++j) {
    const auto& c = spec.conv_layers[j];
    std::vector<Mat> filters;
    for (std::size_t k = 0; k < c.filter_count; ++k) {
      filters.push_back(Mat::from_rowmajor(
          c.filter_rows, c.filter_cols,
          theta.subspan(layout.filter_offset(j, k), c.filter_rows * c.filter_cols)));
    }
    w.filters.push_back(std::move(filters));
    auto b = theta.subspan(layout.bias_offset(j), c.filter_count);
    w.biases.emplace_back(b.begin(), b.end());
  }
  return w;
}

Vec pack_weights(const NetworkSpec& spec, const NetworkWeights& w) {
  const WeightLayout layout(spec);
  if (w.fc.size() != layout.fc_layer_count() || w.filters.size() != layout.conv_layer_count() ||
      w.biases.size() != layout.conv_layer_count()) {
    throw LayoutError("pack_weights: layer count mismatch");
  }
  Vec theta(layout.size(), 0.0);
  auto put = [&](std::size_t offset, std::span<const double> src, std::size_t expected) {
    if (src.size() != expected) throw LayoutError("pack_weights: segment size mismatch");
    std::copy(src.begin(), src.end(), theta.begin() + static_cast<std::ptrdiff_t>(offset));
  };
  for (std::size_t j = 0; j < w.fc.size(); ++j) {
    const auto s = layout.fc_shape(j);
    if (w.fc[j].rows() != s.rows || w.fc[j].cols() != s.cols) throw LayoutError("pack_weights: V shape mismatch");
    put(layout.fc_offset(j), w.fc[j].data(), s.rows * s.cols);
  }
  for (std::size_t j = 0; j < w.filters.size(); ++j) {
    const auto& c = spec.conv_layers[j];
    if (w.filters[j].size() != c.filter_count) throw LayoutError("pack_weights: filter count mismatch");
    for (std::size_t k = 0; k < c.filter_count; ++k) {
      if (w.filters[j][k].rows() != c.filter_rows || w.filters[j][k].cols() != c.filter_cols) {
        throw LayoutError("pack_weights: filter shape mismatch");
      }
      put(layout.filter_offset(j, k), w.filters[j][k].data(), c.filter_rows * c.filter_cols);
    }
    put(layout.bias_offset(j), w.biases[j], c.filter_count);
  }
  return theta;
}

Mat cnn_operator(const Mat& x, std::span<const Mat> filters, std::span<const double> biases) {
  if (filters.empty()) throw ShapeError("cnn_operator: empty filter set");
  if (biases.size() != filters.size()) throw ShapeError("cnn_operator: bias count != filter count");
  const std::size_t p = filters.front().rows();
  const std::size_t m = x.cols();
  for (const auto& w : filters) {
    if (w.cols() != m) throw ShapeError("cnn_operator: filter width != input width");
    if (w.rows() != p) throw ShapeError("cnn_operator: filters differ in height");
  }
  if (p == 0 || p > x.rows()) throw ShapeError("cnn_operator: filter taller than input");

  const std::size_t rows_out = x.rows() - p + 1;
  Mat out(rows_out, filters.size());
  for (std::size_t j = 0; j < filters.size(); ++j) {
    auto w = filters[j].data();
    for (std::size_t i = 0; i < rows_out; ++i) {
      // rows i..i+p-1 of x are contiguous in row-major storage
      auto window = x.data().subspan(i * m, p * m);
      out(i, j) = dot(w, window) + biases[j];
    }
  }
  return out;
}

namespace {

Mat tanh_of(const Mat& a, double scale_in = 1.0, double scale_out = 1.0) {
  Mat out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = scale_out * std::tanh(scale_in * src[k]);
  return out;
}

Vec augmented_tanh(std::span<const double> v) {
  Vec out(v.size() + 1, 1.0);
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::tanh(v[k]);
  return out;
}

Vec transposed_matvec(const Mat& v, std::span<const double> x) {
  // V^T x without materialising V^T
  Vec y(v.cols(), 0.0);
  for (std::size_t r = 0; r < v.rows(); ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    auto row = v.row(r);
    for (std::size_t c = 0; c < v.cols(); ++c) y[c] += row[c] * xr;
  }
  return y;
}

}  // namespace

ForwardTrace forward(const NetworkSpec& spec, const NetworkWeights& w, const Mat& x) {
  if (x.rows() != spec.input_rows || x.cols() != spec.input_cols) {
    throw ShapeError("forward: input is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                     ", spec expects " + std::to_string(spec.input_rows) + "x" +
                     std::to_string(spec.input_cols));
  }
  if (w.fc.size() != spec.fc_widths.size() || w.filters.size() != spec.conv_layers.size()) {
    throw LayoutError("forward: weights do not match network spec");
  }

  ForwardTrace tr;
  tr.input = x;
  if (spec.dnn_mode()) {
    tr.conv_in.push_back(tanh_of(x, 1.0 / spec.alpha2, spec.alpha1));
  } else {
    tr.conv_in.push_back(tanh_of(x, 1.0, spec.alpha1));
  }
  for (std::size_t j = 0; j < spec.conv_layers.size(); ++j) {
    if (j > 0) tr.conv_in.push_back(tanh_of(tr.conv_out.back()));
    try {
      tr.conv_out.push_back(cnn_operator(tr.conv_in.back(), w.filters[j], w.biases[j]));
    } catch (const ShapeError& err) {
      throw ShapeError("forward: conv layer " + std::to_string(j) + ": " + err.what());
    }
  }

  const Mat& last = spec.dnn_mode() ? tr.conv_in.front() : tr.conv_out.back();
  tr.concat = vec_rowmajor(last.transposed());
  tr.concat.push_back(1.0);

  tr.fc_in.push_back(tr.concat);
  for (std::size_t j = 0; j < w.fc.size(); ++j) {
    if (j > 0) tr.fc_in.push_back(augmented_tanh(tr.fc_out.back()));
    if (w.fc[j].rows() != tr.fc_in.back().size()) {
      throw ShapeError("forward: fc layer " + std::to_string(j) + " expects " +
                       std::to_string(w.fc[j].rows()) + " inputs, got " +
                       std::to_string(tr.fc_in.back().size()));
    }
    tr.fc_out.push_back(transposed_matvec(w.fc[j], tr.fc_in.back()));
  }
  tr.output = tr.fc_out.back();
  return tr;
}

ForwardTrace forward(const NetworkSpec& spec, std::span<const double> theta, const Mat& x) {
  return forward(spec, unpack_weights(spec, theta), x);
}

}  // namespace cnnac
