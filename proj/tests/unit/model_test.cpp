#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mrcnn/adam.hpp"
#include "mrcnn/grad_check.hpp"
#include "mrcnn/model.hpp"
#include "oracles.hpp"

using mrcnn::Matrix;
using mrcnn::ModelConfig;
using mrcnn::ModelParams;

namespace {

// n=12, vocab 20, l=4, m=2, k={3,5}, d_f=4, p=1, d^1=3.
ModelConfig small_config() {
  ModelConfig c;
  c.kernel_sizes = {3, 5};
  c.embed_dim = 5;
  c.filter_channels = 4;
  c.channel_schedule = {4, 3};
  c.num_labels = 4;
  c.dropout_rate = 0.0;
  return c;
}

double check(const ModelConfig& c, std::uint64_t seed, std::size_t valid = mrcnn::kAllRows) {
  mrcnn::Rng rng(seed);
  const std::size_t vocab = 20;
  ModelParams p = ModelParams::zeros(c, vocab);
  oracle::randomize(p, rng, 0.5);
  auto tokens = oracle::random_tokens(rng, 12, vocab);
  if (valid != mrcnn::kAllRows) std::fill(tokens.begin() + static_cast<long>(valid), tokens.end(), 0);
  const auto y = oracle::random_targets(rng, static_cast<std::size_t>(c.num_labels));
  mrcnn::ForwardOptions opts;
  opts.valid_length = valid;
  const auto g = mrcnn::backward(mrcnn::forward(tokens, p, c, opts), y, p, c);
  ModelParams dense = ModelParams::zeros(c, vocab);
  g.add_to(dense);
  const auto an = dense.tensors();
  std::vector<const Matrix*> a(an.begin(), an.end());
  auto loss = [&] {
    return mrcnn::bce_loss(mrcnn::forward(tokens, p, c, opts).logits, y).loss;
  };
  const auto r = mrcnn::grad_check(loss, p.tensors(), a, 1e-4);
  return r.max_relative_error;
}

}  // namespace

TEST(Model, GradientCheckSmallConfig) { EXPECT_LE(check(small_config(), 1), 1e-4); }

TEST(Model, GradientCheckRowSumWithoutBias) {
  ModelConfig c = small_config();
  c.output_mode = mrcnn::OutputMode::literal_row_sum;
  c.use_bias = false;
  EXPECT_LE(check(c, 2), 1e-4);
}

TEST(Model, GradientCheckWithBatchPadding) { EXPECT_LE(check(small_config(), 3, 8), 1e-4); }

TEST(Model, GradientCheckDeeperStack) {
  ModelConfig c = small_config();
  c.channel_schedule = {4, 5, 3};
  EXPECT_LE(check(c, 4), 1e-4);
}

TEST(Model, MatchesScalarOracle) {
  mrcnn::Rng rng(5);
  for (auto mode : {mrcnn::OutputMode::per_label, mrcnn::OutputMode::literal_row_sum}) {
    ModelConfig c = small_config();
    c.output_mode = mode;
    ModelParams p = ModelParams::zeros(c, 20);
    oracle::randomize(p, rng, 0.6);
    const auto tokens = oracle::random_tokens(rng, 9, 20);
    const auto got = mrcnn::forward(tokens, p, c).probabilities;
    const auto want = oracle::model_probabilities(tokens, p, c);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Model, InferenceIsDeterministicAndDropoutOnlyInTraining) {
  ModelConfig c = small_config();
  c.dropout_rate = 0.5;
  mrcnn::Rng rng(6);
  ModelParams p = ModelParams::zeros(c, 20);
  oracle::randomize(p, rng, 0.5);
  const auto tokens = oracle::random_tokens(rng, 12, 20);
  EXPECT_EQ(mrcnn::forward(tokens, p, c).probabilities, mrcnn::forward(tokens, p, c).probabilities);
  mrcnn::ForwardOptions train;
  train.training = true;
  train.dropout_seed = 1;
  EXPECT_NE(mrcnn::forward(tokens, p, c, train).probabilities, mrcnn::forward(tokens, p, c).probabilities);
  EXPECT_EQ(mrcnn::forward(tokens, p, c, train).probabilities,
            mrcnn::forward(tokens, p, c, train).probabilities);
}

TEST(Model, LabelPermutationEquivariance) {
  ModelConfig c = small_config();
  mrcnn::Rng rng(7);
  ModelParams p = ModelParams::zeros(c, 20);
  oracle::randomize(p, rng, 0.5);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  ModelParams q = p;
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t r = 0; r < p.attention.rows(); ++r) {
      q.attention(r, j) = p.attention(r, perm[j]);
      q.output(r, j) = p.output(r, perm[j]);
    }
    q.output_bias(0, j) = p.output_bias(0, perm[j]);
  }
  const auto tokens = oracle::random_tokens(rng, 10, 20);
  const auto a = mrcnn::forward(tokens, p, c).probabilities;
  const auto b = mrcnn::forward(tokens, q, c).probabilities;
  for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(b[j], a[perm[j]]);
}

TEST(Model, AttentionColumnsAreDistributionsAndLossNonNegative) {
  ModelConfig c = small_config();
  mrcnn::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    ModelParams p = ModelParams::zeros(c, 20);
    oracle::randomize(p, rng, 1.0);
    const auto tr = mrcnn::forward(oracle::random_tokens(rng, 1 + rng.below(15), 20), p, c);
    for (std::size_t l = 0; l < 4; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < tr.attention.weights.rows(); ++i) s += tr.attention.weights(i, l);
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    EXPECT_GE(mrcnn::bce_loss(tr.logits, oracle::random_targets(rng, 4)).loss, 0.0);
  }
}

TEST(Model, PadRowGetsNoGradient) {
  ModelConfig c = small_config();
  mrcnn::Rng rng(9);
  ModelParams p = ModelParams::zeros(c, 20);
  oracle::randomize(p, rng, 0.5);
  std::vector<mrcnn::TokenId> tokens{3, 0, 5, 0, 7};
  const auto g = mrcnn::backward(mrcnn::forward(tokens, p, c), oracle::random_targets(rng, 4), p, c);
  EXPECT_EQ(g.embedding_rows, (std::vector<mrcnn::TokenId>{3, 5, 7}));
}

TEST(Model, SmallAdamStepReducesLoss) {
  ModelConfig c = small_config();
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    mrcnn::Rng rng({0xADA, trial});
    ModelParams p = ModelParams::zeros(c, 20);
    oracle::randomize(p, rng, 0.5);
    const auto tokens = oracle::random_tokens(rng, 12, 20);
    const auto y = oracle::random_targets(rng, 4);
    const double before = mrcnn::document_loss(tokens, y, p, c);
    ModelParams dense = ModelParams::zeros(c, 20);
    mrcnn::backward(mrcnn::forward(tokens, p, c), y, p, c).add_to(dense);
    auto pt = p.tensors();
    auto gt = dense.tensors();
    std::vector<const Matrix*> gc(gt.begin(), gt.end()), pc(pt.begin(), pt.end());
    mrcnn::AdamState s(pc);
    mrcnn::adam_step(pt, gc, s, 1e-4);
    failures += mrcnn::document_loss(tokens, y, p, c) >= before;
  }
  EXPECT_LE(failures, 1);
}

TEST(Model, TopAttentionPositions) {
  ModelConfig c = small_config();
  mrcnn::Rng rng(10);
  ModelParams p = ModelParams::zeros(c, 20);
  oracle::randomize(p, rng, 1.0);
  const auto tr = mrcnn::forward(oracle::random_tokens(rng, 12, 20), p, c);
  const auto top = mrcnn::top_attention_positions(tr, 1, 3);
  ASSERT_EQ(top.size(), 3u);
  for (std::size_t i = 0; i < 12; ++i) {
    if (std::find(top.begin(), top.end(), i) == top.end()) {
      EXPECT_LE(tr.attention.weights(i, 1), tr.attention.weights(top[2], 1));
    }
  }
  EXPECT_GE(tr.attention.weights(top[0], 1), tr.attention.weights(top[1], 1));
}
