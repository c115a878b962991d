#pragma once

// Closed-form Jacobian of the network output with respect to every weight.
//
// Fully connected blocks use the reverse-ordered chain
//   chain(j) = V_kf^T phi'_kf * ... * V_j^T phi'_j   (identity when j > kf)
// where phi'_l is the (l_l + 1) x l_l derivative of the augmented tanh layer;
// its last row is zero because the appended 1 is constant.
//
// Conv blocks are obtained one output index at a time: the gradient with
// respect to C is reshaped into the last conv output's shape, then pushed back
// through each conv layer as a superposition of shifted filters, then
// multiplied by the tanh derivative of the layer below.

#include <cstddef>
#include <span>
#include <vector>

#include "cnnac/mat.hpp"
#include "cnnac/network.hpp"

namespace cnnac {

// Output-dim x Xi matrix; columns follow WeightLayout.
struct JacobianMatrix {
  Mat matrix;

  std::size_t rows() const { return matrix.rows(); }
  std::size_t cols() const { return matrix.cols(); }
};

struct BackpropState {
  Mat d_concat;  // d Phi / d C, output-dim x concat length

  // Indexed [output i][conv layer j].
  std::vector<std::vector<Mat>> d_conv_out;  // d Phi_i / d conv_out[j]
  std::vector<std::vector<Mat>> d_conv_in;   // d Phi_i / d conv_in[j]
};

struct ConvLayerGrads {
  // Indexed [output i][filter k].
  std::vector<std::vector<Mat>> filters;
  std::vector<Vec> biases;  // [output i], one entry per filter
};

// Derivative of an augmented tanh layer with respect to its pre-activation.
Mat augmented_tanh_derivative(std::span<const double> activated_with_one);

// chain(first) as defined above; output-dim x l_first.
Mat fc_chain(const ForwardTrace& trace, const NetworkWeights& w, std::size_t first);

// d Phi / d vec(V_j) for every fc layer j.
std::vector<Mat> fc_jacobians(const ForwardTrace& trace, const NetworkWeights& w);

BackpropState conv_backprop_seed(const NetworkSpec& spec, const ForwardTrace& trace, const NetworkWeights& w);

// Fills d_conv_in[.][layer] from d_conv_out[.][layer], and d_conv_out[.][layer-1]
// when layer > 0.
void conv_layer_backprop(BackpropState& state, const ForwardTrace& trace, const NetworkWeights& w,
                         std::size_t layer);

ConvLayerGrads conv_weight_jacobians(const BackpropState& state, const ForwardTrace& trace,
                                     const NetworkSpec& spec, std::size_t layer);

JacobianMatrix assemble_full_jacobian(const NetworkSpec& spec, const ForwardTrace& trace,
                                      const NetworkWeights& w);
JacobianMatrix assemble_full_jacobian(const NetworkSpec& spec, const ForwardTrace& trace,
                                      std::span<const double> theta);

}  // namespace cnnac
