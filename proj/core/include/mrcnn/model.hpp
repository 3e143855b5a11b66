#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrcnn/layers.hpp"
#include "mrcnn/model_config.hpp"
#include "mrcnn/params.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {

struct ForwardOptions {
  bool training = false;  // enables dropout on the embedded input
  // Length of the real sequence when `tokens` carries batch padding at the
  // end. Only honoured when the config masks padding.
  std::size_t valid_length = kAllRows;
  std::uint64_t dropout_seed = 0;
};

// Every intermediate needed by backward().
struct ForwardTrace {
  std::vector<TokenId> tokens;
  std::size_t valid_rows = 0;
  Matrix embedded;      // E after dropout, n x d_e
  Matrix dropout_mask;  // n x d_e
  std::vector<Matrix> filter_outputs;                   // H_f, n x d_f
  std::vector<std::vector<ResidualBlockTrace>> blocks;  // per filter, per block
  Matrix features;                                      // H, n x (m d^p)
  AttentionResult attention;                            // A, V
  std::vector<double> logits;
  std::vector<double> probabilities;
};

// Runs one document through embedding lookup, multi-filter convolution,
// residual stacks, per-label attention and the output layer.
ForwardTrace forward(std::span<const TokenId> tokens, const ModelParams& params,
                     const ModelConfig& config, const ForwardOptions& options = {});

// Gradient of the summed binary cross entropy. Dense tensors share the
// layout of ModelParams (embedding left empty); the embedding gradient is
// kept sparse over the rows the document touched, PAD excluded.
struct Gradients {
  ModelParams weights;
  std::vector<TokenId> embedding_rows;  // sorted, unique
  Matrix embedding_values;              // embedding_rows.size() x d_e
  double loss = 0.0;

  // Adds scale * this into a full-shape gradient buffer.
  void add_to(ModelParams& dense, double scale = 1.0) const;
};

Gradients backward(const ForwardTrace& trace, std::span<const std::uint8_t> targets,
                   const ModelParams& params, const ModelConfig& config);

// Loss only (no trace kept). Dropout is off.
double document_loss(std::span<const TokenId> tokens, std::span<const std::uint8_t> targets,
                     const ModelParams& params, const ModelConfig& config);

// The `count` positions with the largest attention weight for `label`,
// strongest first, ties to the earlier position. Batch padding is skipped.
std::vector<std::size_t> top_attention_positions(const ForwardTrace& trace, std::size_t label,
                                                 std::size_t count);

}  // namespace mrcnn
