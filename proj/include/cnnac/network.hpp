#pragma once

// Forward evaluation of the adaptive controller's network: a stack of
// full-width convolutional layers, a concatenate layer, and fully connected
// layers with the bias folded into each weight matrix as an extra row.
//
//   conv_in[0]  = alpha1 * tanh(X)                      (bounded first activation)
//   conv_out[j] = O(conv_in[j], filters[j], biases[j])
//   conv_in[j]  = tanh(conv_out[j-1])                   for j >= 1
//   C           = [vec(conv_out.back()^T); 1]
//   fc_out[0]   = V[0]^T C
//   fc_in[j]    = [tanh(fc_out[j-1]); 1],  fc_out[j] = V[j]^T fc_in[j]
//   output      = fc_out.back()
//
// With no conv layers the network degenerates to a plain MLP whose input is
// alpha1 * tanh(X / alpha2).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cnnac/mat.hpp"

namespace cnnac {

struct ConvLayerSpec {
  std::size_t filter_rows = 0;   // p
  std::size_t filter_cols = 0;   // m, equals the layer's input width
  std::size_t filter_count = 0;  // q

  friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

enum class Activation { Tanh };

struct LayerDims {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct NetworkSpec {
  std::size_t input_rows = 0;  // n0, number of stacked samples
  std::size_t input_cols = 0;  // m0, length of one sample
  std::vector<ConvLayerSpec> conv_layers;
  std::vector<std::size_t> fc_widths;  // l1 .. l_{kf+1}; the last entry is the output size
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  Activation activation = Activation::Tanh;

  // Throws ConfigError naming the first layer whose dimensions do not chain.
  void validate() const;

  bool dnn_mode() const { return conv_layers.empty(); }

  // Input dims of conv layer j for j < conv count; entry conv count is the
  // shape fed to the concatenate layer.
  std::vector<LayerDims> conv_chain() const;

  // Length of C including the trailing 1.
  std::size_t concat_length() const;
  std::size_t output_dim() const { return fc_widths.empty() ? 0 : fc_widths.back(); }

  // Total number of trainable weights.
  std::size_t weight_count() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// Offsets of every weight segment inside the flat weight vector. Layout:
// vec(V_0), ..., vec(V_kf), vec(W_0^(1)), ..., vec(W_kc^(q)), B_0, ..., B_kc.
// Every vec is row-major.
class WeightLayout {
 public:
  explicit WeightLayout(const NetworkSpec& spec);

  std::size_t size() const { return size_; }
  std::size_t fc_block_size() const { return fc_block_; }

  std::size_t fc_offset(std::size_t layer) const { return fc_offsets_.at(layer); }
  LayerDims fc_shape(std::size_t layer) const { return fc_shapes_.at(layer); }
  std::size_t fc_layer_count() const { return fc_shapes_.size(); }

  std::size_t filter_offset(std::size_t layer, std::size_t k) const {
    return filter_offsets_.at(layer).at(k);
  }
  std::size_t bias_offset(std::size_t layer) const { return bias_offsets_.at(layer); }
  std::size_t conv_layer_count() const { return bias_offsets_.size(); }

  // Human-readable segment name for coordinate `index`, e.g. "V1[3,2]".
  std::string describe(std::size_t index) const;

 private:
  std::vector<std::size_t> fc_offsets_;
  std::vector<LayerDims> fc_shapes_;
  std::vector<std::vector<std::size_t>> filter_offsets_;
  std::vector<std::size_t> bias_offsets_;
  std::vector<ConvLayerSpec> conv_;
  std::size_t fc_block_ = 0;
  std::size_t size_ = 0;
};

struct WeightVector {
  Vec theta;

  std::size_t size() const { return theta.size(); }
  double norm() const { return norm2(theta); }
};

struct NetworkWeights {
  std::vector<Mat> fc;                    // V_0 .. V_kf, each (l_j + 1) x l_{j+1}
  std::vector<std::vector<Mat>> filters;  // filters[j][k] is p_j x m_j
  std::vector<Vec> biases;                // biases[j] has q_j entries
};

NetworkWeights unpack_weights(const NetworkSpec& spec, std::span<const double> theta);
Vec pack_weights(const NetworkSpec& spec, const NetworkWeights& w);

struct ForwardTrace {
  Mat input;                  // X
  std::vector<Mat> conv_in;   // activations entering each conv layer; [0] is the scaled input
  std::vector<Mat> conv_out;  // pre-activation outputs of each conv layer
  Vec concat;                 // C, trailing 1 included
  std::vector<Vec> fc_in;     // [0] = C; [j] = [tanh(fc_out[j-1]); 1]
  std::vector<Vec> fc_out;    // pre-activations of each fully connected layer
  Vec output;

  const Mat& scaled_input() const { return conv_in.front(); }
};

// Valid full-width cross-correlation, stride 1: entry (i, j) is the sum of
// filters[j] .* rows i..i+p-1 of x, plus biases[j].
Mat cnn_operator(const Mat& x, std::span<const Mat> filters, std::span<const double> biases);

ForwardTrace forward(const NetworkSpec& spec, const NetworkWeights& w, const Mat& x);
ForwardTrace forward(const NetworkSpec& spec, std::span<const double> theta, const Mat& x);

}  // namespace cnnac
