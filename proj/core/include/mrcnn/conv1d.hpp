#pragma once

#include "mrcnn/matrix.hpp"

namespace mrcnn {

// "Same" 1-D convolution over the row (sequence) axis of an n x in_channels
// input. Kernel size must be odd; padding is kernel_size / 2, stride 1, so the
// output keeps n rows.
struct ConvSpec {
  int kernel_size = 3;
  int in_channels = 1;
  int out_channels = 1;
  bool has_bias = true;
  int stride = 1;

  int padding() const noexcept { return kernel_size / 2; }
  std::size_t weight_rows() const noexcept {
    return static_cast<std::size_t>(kernel_size) * static_cast<std::size_t>(in_channels);
  }
  // Throws ConfigError for even/non-positive kernels, stride != 1 or empty
  // channel counts.
  void validate() const;
};

// Weight layout: row (t * in_channels + c) holds the weights applied to
// channel c of the input row at window offset t, i.e. the window is flattened
// row-major before the product with W.
//
//   out(j, :) = sum_t sum_c x(j - pad + t, c) * W(t * in + c, :) + b
//
// Rows outside [0, n) read as zero. No activation is applied. `bias` must be
// 1 x out_channels when spec.has_bias and is ignored otherwise.
Matrix conv1d_forward(const Matrix& x, const ConvSpec& spec, const Matrix& weight,
                      const Matrix& bias);

struct ConvGrads {
  Matrix input;
  Matrix weight;
  Matrix bias;  // empty when the spec has no bias
};

ConvGrads conv1d_backward(const Matrix& x, const ConvSpec& spec, const Matrix& weight,
                          const Matrix& grad_out);

// Accumulating form used by the model: adds into existing buffers. Pass
// nullptr for grad_input or grad_bias to skip them.
void conv1d_backward_accumulate(const Matrix& x, const ConvSpec& spec,
                                const Matrix& weight, const Matrix& grad_out,
                                Matrix* grad_input, Matrix& grad_weight,
                                Matrix* grad_bias);

}  // namespace mrcnn
