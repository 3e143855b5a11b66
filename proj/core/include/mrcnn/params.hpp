#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mrcnn/conv1d.hpp"
#include "mrcnn/embeddings.hpp"
#include "mrcnn/matrix.hpp"
#include "mrcnn/model_config.hpp"

namespace mrcnn {

struct ConvParams {
  ConvSpec spec;
  Matrix weight;  // (k * in) x out
  Matrix bias;    // 1 x out, empty when spec.has_bias is false
};

// Residual block: first = k-conv + tanh, second = k-conv, shortcut = 1x1 conv.
struct ResidualBlockParams {
  ConvParams first;
  ConvParams second;
  ConvParams shortcut;
};

struct FilterParams {
  ConvParams conv;
  std::vector<ResidualBlockParams> blocks;
};

// All learnable tensors. Flat enumeration order (stable, used by the
// optimizer, the gradient check and checkpoints):
//   embedding,
//   per filter f: conv.weight, conv.bias,
//     per block b: first.{weight,bias}, second.{weight,bias}, shortcut.{weight,bias}
//   attention (U), output (W), output_bias.
// Bias tensors are absent from the enumeration when the config disables them.
struct ModelParams {
  Matrix embedding;                  // |V| x d_e
  std::vector<FilterParams> filters;
  Matrix attention;                  // (m d^p) x l
  Matrix output;                     // (m d^p) x l
  Matrix output_bias;                // 1 x l or empty

  // Zero tensors with the shapes implied by config and vocab_size. Pass
  // vocab_size 0 to leave the embedding empty.
  static ModelParams zeros(const ModelConfig& config, std::size_t vocab_size);

  void for_each(const std::function<void(const std::string&, Matrix&)>& fn);
  void for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const;
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  std::vector<std::string> names() const;
  // Number of scalars in the enumeration.
  std::size_t scalar_count() const;
  void set_zero();
};

struct ParamBreakdown {
  std::size_t embedding = 0;
  std::size_t filters = 0;
  std::size_t residual = 0;
  std::size_t attention = 0;
  std::size_t output = 0;

  std::size_t total() const noexcept { return embedding + filters + residual + attention + output; }
};

// Closed form:
//   V d_e + sum_m [k_m d_e d_f (+ d_f)]
//   + sum_m sum_i [k_m d^{i-1} d^i + k_m d^i d^i + d^{i-1} d^i (+ 3 d^i)]
//   + (m d^p) l + (m d^p) l (+ l)
ParamBreakdown param_count(const ModelConfig& config, std::size_t vocab_size);

// Xavier-uniform conv, attention and output weights (limit sqrt(6 / (rows +
// cols))) drawn in enumeration order; zero biases; embedding copied from
// `embeddings` with the PAD row forced to zero.
ModelParams init_params(const ModelConfig& config, const EmbeddingMatrix& embeddings,
                        std::uint64_t seed);

}  // namespace mrcnn
