#include <gtest/gtest.h>

#include <cmath>

#include "mrcnn/grad_check.hpp"
#include "mrcnn/layers.hpp"
#include "oracles.hpp"

using mrcnn::Matrix;
using mrcnn::ModelConfig;
using mrcnn::ModelParams;

namespace {

ModelConfig block_config(int k, int d_in, int d_out) {
  ModelConfig c;
  c.kernel_sizes = {k};
  c.embed_dim = 2;
  c.filter_channels = d_in;
  c.channel_schedule = {d_in, d_out};
  c.num_labels = 2;
  return c;
}

}  // namespace

TEST(MultiFilter, ZeroInputGivesZeroOutput) {
  ModelConfig c = oracle::micro_config("multicnn");
  ModelParams p = ModelParams::zeros(c, 0);
  mrcnn::Rng rng(1);
  for (auto& f : p.filters) f.conv.weight = oracle::random_matrix(rng, f.conv.weight.rows(), f.conv.weight.cols());
  for (const Matrix& h : mrcnn::multi_filter_forward(Matrix(6, 4), p))
    for (double v : h.values()) EXPECT_EQ(v, 0.0);
}

TEST(MultiFilter, SinglePositionInput) {
  ModelConfig c = oracle::micro_config("multicnn");
  ModelParams p = ModelParams::zeros(c, 0);
  mrcnn::Rng rng(2);
  oracle::randomize(p, rng, 1.0);
  const Matrix e = oracle::random_matrix(rng, 1, 4);
  const auto hs = mrcnn::multi_filter_forward(e, p);
  const auto want = oracle::multi_filter(e, p);
  for (std::size_t f = 0; f < hs.size(); ++f) {
    EXPECT_EQ(hs[f].rows(), 1u);
    EXPECT_EQ(hs[f].cols(), 3u);
    EXPECT_LE(mrcnn::max_abs_diff(hs[f], want[f]), 1e-12);
  }
}

TEST(ResidualBlock, ZeroInputZeroBiasGivesZero) {
  ModelParams p = ModelParams::zeros(block_config(3, 3, 2), 0);
  mrcnn::Rng rng(3);
  auto& b = p.filters[0].blocks[0];
  b.first.weight = oracle::random_matrix(rng, b.first.weight.rows(), b.first.weight.cols());
  const Matrix out = mrcnn::residual_block_forward(Matrix(5, 3), b);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(ResidualBlock, MatchesTranscription) {
  mrcnn::Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p = ModelParams::zeros(block_config(3, 3, 2), 0);
    oracle::randomize(p, rng, 1.0);
    const Matrix x = oracle::random_matrix(rng, 5, 3);
    EXPECT_LE(mrcnn::max_abs_diff(mrcnn::residual_block_forward(x, p.filters[0].blocks[0]),
                                  oracle::residual_block(x, p.filters[0].blocks[0])),
              1e-12);
  }
}

TEST(ResidualBlock, GradientCheck) {
  mrcnn::Rng rng(5);
  ModelParams p = ModelParams::zeros(block_config(3, 3, 2), 0);
  oracle::randomize(p, rng, 0.8);
  auto& block = p.filters[0].blocks[0];
  Matrix x = oracle::random_matrix(rng, 6, 3);
  const Matrix go = oracle::random_matrix(rng, 6, 2);
  auto loss = [&] {
    const Matrix y = mrcnn::residual_block_forward(x, block);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * go[i];
    return s;
  };
  mrcnn::ResidualBlockTrace trace;
  mrcnn::residual_block_forward(x, block, &trace);
  ModelParams g = ModelParams::zeros(block_config(3, 3, 2), 0);
  auto& gb = g.filters[0].blocks[0];
  const Matrix gx = mrcnn::residual_block_backward(x, block, trace, go, gb);
  std::vector<Matrix*> params{&x, &block.first.weight, &block.first.bias, &block.second.weight,
                              &block.second.bias, &block.shortcut.weight, &block.shortcut.bias};
  std::vector<const Matrix*> grads{&gx, &gb.first.weight, &gb.first.bias, &gb.second.weight,
                                   &gb.second.bias, &gb.shortcut.weight, &gb.shortcut.bias};
  const auto r = mrcnn::grad_check(loss, params, grads, 1e-5);
  EXPECT_LE(r.max_relative_error, 1e-4) << r.describe();
}

TEST(ResidualStack, WidthsFollowSchedule) {
  ModelConfig c = block_config(3, 6, 2);
  c.channel_schedule = {6, 9, 4, 2};
  ModelParams p = ModelParams::zeros(c, 0);
  mrcnn::Rng rng(6);
  oracle::randomize(p, rng, 0.5);
  std::vector<mrcnn::ResidualBlockTrace> traces;
  const Matrix out = mrcnn::residual_stack_forward(oracle::random_matrix(rng, 7, 6), p.filters[0], &traces);
  ASSERT_EQ(traces.size(), 3u);
  EXPECT_EQ(traces[0].output.cols(), 9u);
  EXPECT_EQ(traces[1].output.cols(), 4u);
  EXPECT_EQ(out.cols(), 2u);
  EXPECT_EQ(out.rows(), 7u);
}

TEST(ResidualStack, SingleBlockEqualsBlockCall) {
  ModelParams p = ModelParams::zeros(block_config(5, 3, 2), 0);
  mrcnn::Rng rng(7);
  oracle::randomize(p, rng, 0.5);
  const Matrix x = oracle::random_matrix(rng, 4, 3);
  EXPECT_EQ(mrcnn::residual_stack_forward(x, p.filters[0]),
            mrcnn::residual_block_forward(x, p.filters[0].blocks[0]));
}

TEST(Concat, SingleAndTwoBlocks) {
  mrcnn::Rng rng(8);
  const Matrix a = oracle::random_matrix(rng, 3, 2);
  EXPECT_EQ(mrcnn::concat_features(std::vector<Matrix>{a}), a);
  const Matrix h = mrcnn::concat_features(std::vector<Matrix>{Matrix(3, 2, 1.0), Matrix(3, 2, 2.0)});
  EXPECT_EQ(h, (Matrix{{1, 1, 2, 2}, {1, 1, 2, 2}, {1, 1, 2, 2}}));
}

TEST(Attention, SinglePositionTakesAllWeight) {
  mrcnn::Rng rng(9);
  const Matrix h = oracle::random_matrix(rng, 1, 4);
  const auto r = mrcnn::attention_forward(h, oracle::random_matrix(rng, 4, 3));
  for (double v : r.weights.values()) EXPECT_DOUBLE_EQ(v, 1.0);
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(r.context(l, j), h(0, j));
}

TEST(Attention, ZeroQueryAveragesPositions) {
  mrcnn::Rng rng(10);
  const Matrix h = oracle::random_matrix(rng, 5, 3);
  const auto r = mrcnn::attention_forward(h, Matrix(3, 2));
  for (double v : r.weights.values()) EXPECT_DOUBLE_EQ(v, 0.2);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 5; ++i) mean += h(i, j) / 5.0;
    EXPECT_NEAR(r.context(0, j), mean, 1e-15);
  }
}

TEST(Attention, ContextIsConvexCombination) {
  mrcnn::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix h = oracle::random_matrix(rng, 6, 4, 3.0);
    const auto r = mrcnn::attention_forward(h, oracle::random_matrix(rng, 4, 5, 2.0));
    for (std::size_t l = 0; l < 5; ++l) {
      double total = 0.0;
      for (std::size_t i = 0; i < 6; ++i) total += r.weights(i, l);
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
    for (std::size_t j = 0; j < 4; ++j) {
      double lo = 1e9, hi = -1e9;
      for (std::size_t i = 0; i < 6; ++i) {
        lo = std::min(lo, h(i, j));
        hi = std::max(hi, h(i, j));
      }
      for (std::size_t l = 0; l < 5; ++l) {
        EXPECT_GE(r.context(l, j), lo - 1e-12);
        EXPECT_LE(r.context(l, j), hi + 1e-12);
      }
    }
  }
}

TEST(Output, ZeroWeightsGiveHalf) {
  mrcnn::Rng rng(12);
  const auto r = mrcnn::output_forward(oracle::random_matrix(rng, 3, 4), Matrix(4, 3), Matrix(1, 3),
                                       mrcnn::OutputMode::per_label);
  for (double p : r.probabilities) EXPECT_EQ(p, 0.5);
}

TEST(Output, ModesCoincideForOneLabel) {
  mrcnn::Rng rng(13);
  const Matrix v = oracle::random_matrix(rng, 1, 4), w = oracle::random_matrix(rng, 4, 1),
               b = oracle::random_matrix(rng, 1, 1);
  EXPECT_EQ(mrcnn::output_forward(v, w, b, mrcnn::OutputMode::per_label).logits,
            mrcnn::output_forward(v, w, b, mrcnn::OutputMode::literal_row_sum).logits);
}

TEST(Output, RowSumEqualsSharedVectorForm) {
  mrcnn::Rng rng(14);
  const Matrix v = oracle::random_matrix(rng, 5, 4), w = oracle::random_matrix(rng, 4, 5),
               b = oracle::random_matrix(rng, 1, 5);
  const auto r = mrcnn::output_forward(v, w, b, mrcnn::OutputMode::literal_row_sum);
  for (std::size_t i = 0; i < 5; ++i) {
    double want = b(0, i);
    for (std::size_t t = 0; t < 4; ++t) {
      double wsum = 0.0;
      for (std::size_t j = 0; j < 5; ++j) wsum += w(t, j);
      want += v(i, t) * wsum;
    }
    EXPECT_NEAR(r.logits[i], want, 1e-12);
  }
}

TEST(Bce, ZeroLogitsGiveLog2PerLabel) {
  const std::vector<double> z(4, 0.0);
  const std::vector<std::uint8_t> y{1, 0, 0, 1};
  const auto r = mrcnn::bce_loss(z, y);
  EXPECT_NEAR(r.loss, 4 * std::log(2.0), 1e-15);
  EXPECT_EQ(r.grad_logits, (std::vector<double>{-0.5, 0.5, 0.5, -0.5}));
}

TEST(Bce, SaturatedLogitsStayFinite) {
  const auto good = mrcnn::bce_loss(std::vector<double>{800.0}, std::vector<std::uint8_t>{1});
  EXPECT_NEAR(good.loss, 0.0, 1e-300);
  const auto bad = mrcnn::bce_loss(std::vector<double>{800.0}, std::vector<std::uint8_t>{0});
  EXPECT_NEAR(bad.loss, 800.0, 1e-9);
  EXPECT_TRUE(std::isfinite(bad.grad_logits[0]));
}

TEST(Bce, GradientMatchesFiniteDifferences) {
  mrcnn::Rng rng(15);
  Matrix z = oracle::random_matrix(rng, 1, 6, 4.0);
  const auto y = oracle::random_targets(rng, 6);
  auto loss = [&] { return mrcnn::bce_loss(z.values(), y).loss; };
  const Matrix g = Matrix::row_vector(mrcnn::bce_loss(z.values(), y).grad_logits);
  std::vector<Matrix*> ps{&z};
  std::vector<const Matrix*> gs{&g};
  const auto r = mrcnn::grad_check(loss, ps, gs, 1e-6);
  EXPECT_LE(r.max_relative_error, 1e-6) << r.describe();
}
