#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrcnn/activations.hpp"
#include "mrcnn/matrix.hpp"
#include "mrcnn/model_config.hpp"
#include "mrcnn/params.hpp"

namespace mrcnn {

// Every layer takes `valid_rows`: rows at or beyond it belong to batch
// padding. Their activations are forced to zero, which makes a padded
// sequence behave exactly like the unpadded one. kAllRows disables this.

// H_f = tanh(conv_{k_f}(E)) for every filter f; each is n x d_f.
std::vector<Matrix> multi_filter_forward(const Matrix& embedded, const ModelParams& params,
                                         std::size_t valid_rows = kAllRows);

struct ResidualBlockTrace {
  Matrix hidden;  // X1 = tanh(conv_k(X))
  Matrix output;  // tanh(conv_k(X1) + conv_1(X))
};

// X1 = tanh(conv_k(X)); X2 = conv_k(X1); X3 = conv_1(X); out = tanh(X2 + X3).
Matrix residual_block_forward(const Matrix& x, const ResidualBlockParams& block,
                              ResidualBlockTrace* trace = nullptr,
                              std::size_t valid_rows = kAllRows);

// Applies the filter's blocks in order; n x d^p.
Matrix residual_stack_forward(const Matrix& h, const FilterParams& filter,
                              std::vector<ResidualBlockTrace>* traces = nullptr,
                              std::size_t valid_rows = kAllRows);

// Column-wise concatenation in filter order.
Matrix concat_features(std::span<const Matrix> per_filter);

struct AttentionResult {
  Matrix weights;  // A: n x l, each column a distribution over positions
  Matrix context;  // V = A^T H: l x (m d^p)
};

AttentionResult attention_forward(const Matrix& features, const Matrix& attention,
                                  std::size_t valid_rows = kAllRows);

struct OutputResult {
  std::vector<double> logits;         // y_hat
  std::vector<double> probabilities;  // sigmoid(y_hat)
};

OutputResult output_forward(const Matrix& context, const Matrix& output, const Matrix& bias,
                            OutputMode mode);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad_logits;  // sigmoid(y_hat) - y
};

// Summed binary cross entropy, computed from logits as
// softplus(y_hat) - y * y_hat so saturated probabilities never reach log().
LossResult bce_loss(std::span<const double> logits, std::span<const std::uint8_t> targets);

// ---- backward passes --------------------------------------------------------

struct OutputGrads {
  Matrix context;
  Matrix output;
  Matrix bias;  // empty if `bias` was empty
};

OutputGrads output_backward(const Matrix& context, const Matrix& output, const Matrix& bias,
                            OutputMode mode, std::span<const double> grad_logits);

struct AttentionGrads {
  Matrix features;
  Matrix attention;
};

AttentionGrads attention_backward(const Matrix& features, const Matrix& attention,
                                  const AttentionResult& forward, const Matrix& grad_context);

// Returns dL/dX and adds the block's weight gradients into `grads`.
Matrix residual_block_backward(const Matrix& x, const ResidualBlockParams& block,
                               const ResidualBlockTrace& trace, const Matrix& grad_output,
                               ResidualBlockParams& grads, std::size_t valid_rows = kAllRows);

}  // namespace mrcnn
