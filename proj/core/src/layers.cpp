#include "mrcnn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "mrcnn/conv1d.hpp"
#include "mrcnn/errors.hpp"

namespace mrcnn {
namespace {

Matrix conv(const Matrix& x, const ConvParams& p) {
  return conv1d_forward(x, p.spec, p.weight, p.bias);
}

void tanh_in_place(Matrix& m, std::size_t valid_rows) {
  for (auto& v : m.values()) v = std::tanh(v);
  zero_rows_from(m, valid_rows);
  check_finite(m, "tanh");
}

// grad * (1 - y^2), zero on padding rows.
Matrix tanh_backward(const Matrix& y, const Matrix& grad, std::size_t valid_rows) {
  Matrix out(y.rows(), y.cols());
  const std::size_t n = std::min(valid_rows, y.rows());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < y.cols(); ++c) {
      const double v = y(r, c);
      out(r, c) = grad(r, c) * (1.0 - v * v);
    }
  }
  return out;
}

void conv_backward(const Matrix& x, const ConvParams& p, const Matrix& grad_out,
                   Matrix* grad_input, ConvParams& grads) {
  conv1d_backward_accumulate(x, p.spec, p.weight, grad_out, grad_input, grads.weight,
                             p.spec.has_bias ? &grads.bias : nullptr);
}

}  // namespace

std::vector<Matrix> multi_filter_forward(const Matrix& embedded, const ModelParams& params,
                                         std::size_t valid_rows) {
  std::vector<Matrix> out;
  out.reserve(params.filters.size());
  for (const auto& f : params.filters) {
    Matrix h = conv(embedded, f.conv);
    tanh_in_place(h, valid_rows);
    out.push_back(std::move(h));
  }
  return out;
}

Matrix residual_block_forward(const Matrix& x, const ResidualBlockParams& block,
                              ResidualBlockTrace* trace, std::size_t valid_rows) {
  Matrix hidden = conv(x, block.first);
  tanh_in_place(hidden, valid_rows);
  Matrix out = conv(hidden, block.second);
  out += conv(x, block.shortcut);
  tanh_in_place(out, valid_rows);
  if (trace != nullptr) {
    trace->hidden = std::move(hidden);
    trace->output = out;
  }
  return out;
}

Matrix residual_stack_forward(const Matrix& h, const FilterParams& filter,
                              std::vector<ResidualBlockTrace>* traces, std::size_t valid_rows) {
  if (traces != nullptr) traces->assign(filter.blocks.size(), {});
  Matrix x = h;
  for (std::size_t b = 0; b < filter.blocks.size(); ++b) {
    x = residual_block_forward(x, filter.blocks[b], traces ? &(*traces)[b] : nullptr, valid_rows);
  }
  return x;
}

Matrix concat_features(std::span<const Matrix> per_filter) { return hconcat(per_filter); }

AttentionResult attention_forward(const Matrix& features, const Matrix& attention,
                                  std::size_t valid_rows) {
  AttentionResult r;
  r.weights = softmax_over_rows(matmul(features, attention), valid_rows);
  r.context = matmul_tn(r.weights, features);
  return r;
}

OutputResult output_forward(const Matrix& context, const Matrix& output, const Matrix& bias,
                            OutputMode mode) {
  const std::size_t l = output.cols();
  require_shape(context, l, output.rows(), "output_forward context");
  if (!bias.empty()) require_shape(bias, 1, l, "output_forward bias");
  OutputResult r;
  r.logits.assign(l, 0.0);
  if (mode == OutputMode::per_label) {
    for (std::size_t i = 0; i < l; ++i) {
      double s = 0.0;
      for (std::size_t d = 0; d < output.rows(); ++d) s += context(i, d) * output(d, i);
      r.logits[i] = s;
    }
  } else {
    std::vector<double> row_sums(output.rows(), 0.0);
    for (std::size_t d = 0; d < output.rows(); ++d)
      for (std::size_t j = 0; j < l; ++j) row_sums[d] += output(d, j);
    for (std::size_t i = 0; i < l; ++i) {
      double s = 0.0;
      for (std::size_t d = 0; d < output.rows(); ++d) s += context(i, d) * row_sums[d];
      r.logits[i] = s;
    }
  }
  if (!bias.empty())
    for (std::size_t i = 0; i < l; ++i) r.logits[i] += bias[i];
  r.probabilities.resize(l);
  for (std::size_t i = 0; i < l; ++i) r.probabilities[i] = sigmoid(r.logits[i]);
  return r;
}

LossResult bce_loss(std::span<const double> logits, std::span<const std::uint8_t> targets) {
  if (logits.size() != targets.size()) {
    throw ShapeError("bce_loss: " + std::to_string(logits.size()) + " logits vs " +
                     std::to_string(targets.size()) + " targets");
  }
  LossResult r;
  r.grad_logits.resize(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    const double y = targets[j] != 0 ? 1.0 : 0.0;
    r.loss += softplus(logits[j]) - y * logits[j];
    r.grad_logits[j] = sigmoid(logits[j]) - y;
  }
  return r;
}

OutputGrads output_backward(const Matrix& context, const Matrix& output, const Matrix& bias,
                            OutputMode mode, std::span<const double> grad_logits) {
  const std::size_t l = output.cols();
  const std::size_t width = output.rows();
  OutputGrads g{Matrix(l, width), Matrix(width, l), bias.empty() ? Matrix() : Matrix(1, l)};
  if (mode == OutputMode::per_label) {
    for (std::size_t i = 0; i < l; ++i) {
      const double gi = grad_logits[i];
      for (std::size_t d = 0; d < width; ++d) {
        g.context(i, d) = gi * output(d, i);
        g.output(d, i) = gi * context(i, d);
      }
    }
  } else {
    std::vector<double> row_sums(width, 0.0);
    for (std::size_t d = 0; d < width; ++d)
      for (std::size_t j = 0; j < l; ++j) row_sums[d] += output(d, j);
    std::vector<double> grad_sums(width, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t d = 0; d < width; ++d) {
        g.context(i, d) = grad_logits[i] * row_sums[d];
        grad_sums[d] += grad_logits[i] * context(i, d);
      }
    }
    for (std::size_t d = 0; d < width; ++d)
      for (std::size_t j = 0; j < l; ++j) g.output(d, j) = grad_sums[d];
  }
  if (!bias.empty())
    for (std::size_t i = 0; i < l; ++i) g.bias[i] = grad_logits[i];
  return g;
}

AttentionGrads attention_backward(const Matrix& features, const Matrix& attention,
                                  const AttentionResult& forward, const Matrix& grad_context) {
  const Matrix& a = forward.weights;
  // V = A^T H  =>  dA = H dV^T, dH = A dV
  Matrix grad_weights = matmul_nt(features, grad_context);
  AttentionGrads g;
  g.features = matmul(a, grad_context);
  // Column softmax: dZ(t, i) = A(t, i) (dA(t, i) - sum_s A(s, i) dA(s, i))
  Matrix grad_scores(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    double dot = 0.0;
    for (std::size_t t = 0; t < a.rows(); ++t) dot += a(t, i) * grad_weights(t, i);
    for (std::size_t t = 0; t < a.rows(); ++t) grad_scores(t, i) = a(t, i) * (grad_weights(t, i) - dot);
  }
  // Z = H U
  g.features += matmul_nt(grad_scores, attention);
  g.attention = matmul_tn(features, grad_scores);
  return g;
}

Matrix residual_block_backward(const Matrix& x, const ResidualBlockParams& block,
                               const ResidualBlockTrace& trace, const Matrix& grad_output,
                               ResidualBlockParams& grads, std::size_t valid_rows) {
  const Matrix grad_sum = tanh_backward(trace.output, grad_output, valid_rows);
  Matrix grad_hidden(trace.hidden.rows(), trace.hidden.cols());
  conv_backward(trace.hidden, block.second, grad_sum, &grad_hidden, grads.second);
  const Matrix grad_hidden_pre = tanh_backward(trace.hidden, grad_hidden, valid_rows);

  Matrix grad_x(x.rows(), x.cols());
  conv_backward(x, block.first, grad_hidden_pre, &grad_x, grads.first);
  conv_backward(x, block.shortcut, grad_sum, &grad_x, grads.shortcut);
  return grad_x;
}

}  // namespace mrcnn
