#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mrcnn/matrix.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {

struct SkipGramConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;  // decays linearly to lr * 1e-4 over all epochs
  std::uint64_t seed = 1;

  friend bool operator==(const SkipGramConfig&, const SkipGramConfig&) = default;
};

// Skip-gram with negative sampling. For every (center w, context c) pair
// inside the window, ascends log s(u_c . v_w) + sum_neg log s(-u_n . v_w) with
// negatives drawn from the unigram^0.75 distribution. PAD and UNK are never
// trained. Returns the input vectors v (vocab_size x dim); with epochs == 0
// these are the initial values, uniform in [-0.5/dim, 0.5/dim]. Single
// threaded and deterministic for a given seed. Throws DataError if the corpus
// is empty or no sequence is longer than the window.
Matrix pretrain_skipgram(std::span<const std::vector<TokenId>> corpus,
                         std::size_t vocab_size, const SkipGramConfig& config);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace mrcnn
