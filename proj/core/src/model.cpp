#include "mrcnn/model.hpp"

#include <algorithm>
#include <numeric>

#include "mrcnn/errors.hpp"
#include "mrcnn/rng.hpp"

namespace mrcnn {
namespace {

Matrix lookup(std::span<const TokenId> tokens, const Matrix& table, std::size_t valid_rows) {
  Matrix e(tokens.size(), table.cols());
  for (std::size_t t = 0; t < std::min(valid_rows, tokens.size()); ++t) {
    const auto id = tokens[t];
    if (id < 0 || static_cast<std::size_t>(id) >= table.rows()) {
      throw DataError("token id " + std::to_string(id) + " outside embedding table of " +
                      std::to_string(table.rows()) + " rows");
    }
    const auto src = table.row(static_cast<std::size_t>(id));
    std::copy(src.begin(), src.end(), e.row(t).begin());
  }
  return e;
}

// Element-wise tanh derivative applied to a gradient, zero past valid_rows.
Matrix through_tanh(const Matrix& y, const Matrix& grad, std::size_t valid_rows) {
  Matrix out(y.rows(), y.cols());
  for (std::size_t r = 0; r < std::min(valid_rows, y.rows()); ++r)
    for (std::size_t c = 0; c < y.cols(); ++c) out(r, c) = grad(r, c) * (1.0 - y(r, c) * y(r, c));
  return out;
}

}  // namespace

ForwardTrace forward(std::span<const TokenId> tokens, const ModelParams& params,
                     const ModelConfig& config, const ForwardOptions& options) {
  if (tokens.empty()) throw DataError("forward: empty token sequence");
  if (params.filters.size() != config.num_filters()) {
    throw ShapeError("forward: parameters do not match the config's filter count");
  }
  ForwardTrace tr;
  tr.tokens.assign(tokens.begin(), tokens.end());
  tr.valid_rows = config.mask_padding ? std::min(options.valid_length, tokens.size()) : tokens.size();
  if (tr.valid_rows == 0) throw DataError("forward: valid length is zero");

  Matrix raw = lookup(tokens, params.embedding, tr.valid_rows);
  Rng rng({options.dropout_seed, 0xD120ULL});
  auto dropped = dropout(raw, config.dropout_rate, options.training, rng);
  tr.embedded = std::move(dropped.output);
  tr.dropout_mask = std::move(dropped.mask);

  tr.filter_outputs = multi_filter_forward(tr.embedded, params, tr.valid_rows);
  tr.blocks.resize(params.filters.size());
  std::vector<Matrix> stacked;
  stacked.reserve(params.filters.size());
  for (std::size_t f = 0; f < params.filters.size(); ++f) {
    stacked.push_back(residual_stack_forward(tr.filter_outputs[f], params.filters[f],
                                             &tr.blocks[f], tr.valid_rows));
  }
  tr.features = concat_features(stacked);
  tr.attention = attention_forward(tr.features, params.attention, tr.valid_rows);
  auto out = output_forward(tr.attention.context, params.output, params.output_bias,
                            config.output_mode);
  tr.logits = std::move(out.logits);
  tr.probabilities = std::move(out.probabilities);
  return tr;
}

Gradients backward(const ForwardTrace& tr, std::span<const std::uint8_t> targets,
                   const ModelParams& params, const ModelConfig& config) {
  Gradients g;
  g.weights = ModelParams::zeros(config, 0);
  const auto loss = bce_loss(tr.logits, targets);
  g.loss = loss.loss;

  auto out = output_backward(tr.attention.context, params.output, params.output_bias,
                             config.output_mode, loss.grad_logits);
  g.weights.output = std::move(out.output);
  if (!params.output_bias.empty()) g.weights.output_bias = std::move(out.bias);

  auto att = attention_backward(tr.features, params.attention, tr.attention, out.context);
  g.weights.attention = std::move(att.attention);

  const std::size_t n = tr.embedded.rows();
  const std::size_t width = config.output_channels();
  Matrix grad_embedded(n, tr.embedded.cols());
  for (std::size_t f = 0; f < params.filters.size(); ++f) {
    const auto& filter = params.filters[f];
    auto& gfilter = g.weights.filters[f];

    Matrix grad(n, width);
    for (std::size_t r = 0; r < n; ++r) {
      const auto src = att.features.row(r).subspan(f * width, width);
      std::copy(src.begin(), src.end(), grad.row(r).begin());
    }
    for (std::size_t b = filter.blocks.size(); b-- > 0;) {
      const Matrix& input = b == 0 ? tr.filter_outputs[f] : tr.blocks[f][b - 1].output;
      grad = residual_block_backward(input, filter.blocks[b], tr.blocks[f][b], grad,
                                     gfilter.blocks[b], tr.valid_rows);
    }
    const Matrix grad_pre = through_tanh(tr.filter_outputs[f], grad, tr.valid_rows);
    conv1d_backward_accumulate(tr.embedded, filter.conv.spec, filter.conv.weight, grad_pre,
                               &grad_embedded, gfilter.conv.weight,
                               filter.conv.spec.has_bias ? &gfilter.conv.bias : nullptr);
  }

  // Scatter into the touched embedding rows; PAD never receives gradient.
  const std::size_t valid = std::min(tr.valid_rows, n);
  std::vector<TokenId> rows(tr.tokens.begin(), tr.tokens.begin() + static_cast<std::ptrdiff_t>(valid));
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  rows.erase(std::remove(rows.begin(), rows.end(), Vocabulary::kPad), rows.end());
  g.embedding_values = Matrix(rows.size(), tr.embedded.cols());
  for (std::size_t t = 0; t < valid; ++t) {
    const TokenId id = tr.tokens[t];
    if (id == Vocabulary::kPad) continue;
    const auto slot = static_cast<std::size_t>(std::lower_bound(rows.begin(), rows.end(), id) - rows.begin());
    auto dst = g.embedding_values.row(slot);
    const auto src = grad_embedded.row(t);
    const auto mask = tr.dropout_mask.row(t);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c] * mask[c];
  }
  g.embedding_rows = std::move(rows);
  return g;
}

void Gradients::add_to(ModelParams& dense, double scale) const {
  auto dst = dense.tensors();
  const auto src = weights.tensors();
  // weights has no embedding entry; dense does.
  const std::size_t offset = dense.embedding.empty() ? 0 : 1;
  if (dst.size() != src.size() + offset) {
    throw ShapeError("Gradients::add_to: tensor layouts differ");
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    Matrix& d = *dst[i + offset];
    const Matrix& s = *src[i];
    require_shape(d, s.rows(), s.cols(), "Gradients::add_to");
    for (std::size_t k = 0; k < s.size(); ++k) d[k] += scale * s[k];
  }
  if (offset == 1) {
    for (std::size_t r = 0; r < embedding_rows.size(); ++r) {
      auto d = dense.embedding.row(static_cast<std::size_t>(embedding_rows[r]));
      const auto s = embedding_values.row(r);
      for (std::size_t c = 0; c < d.size(); ++c) d[c] += scale * s[c];
    }
  }
}

double document_loss(std::span<const TokenId> tokens, std::span<const std::uint8_t> targets,
                     const ModelParams& params, const ModelConfig& config) {
  const auto tr = forward(tokens, params, config);
  return bce_loss(tr.logits, targets).loss;
}

std::vector<std::size_t> top_attention_positions(const ForwardTrace& trace, std::size_t label,
                                                 std::size_t count) {
  const Matrix& a = trace.attention.weights;
  if (label >= a.cols()) throw ShapeError("top_attention_positions: label out of range");
  const std::size_t n = std::min(trace.valid_rows, a.rows());
  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  count = std::min(count, n);
  std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(count), pos.end(),
                    [&](std::size_t x, std::size_t y) {
                      return a(x, label) != a(y, label) ? a(x, label) > a(y, label) : x < y;
                    });
  pos.resize(count);
  return pos;
}

}  // namespace mrcnn
