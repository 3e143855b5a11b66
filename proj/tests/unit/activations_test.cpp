#include <gtest/gtest.h>

#include <cmath>

#include "mrcnn/activations.hpp"
#include "mrcnn/rng.hpp"
#include "oracles.hpp"

using mrcnn::Matrix;

TEST(Activations, SigmoidAndTanhAtZero) {
  EXPECT_EQ(mrcnn::sigmoid(0.0), 0.5);
  EXPECT_EQ(mrcnn::tanh_ew(Matrix(1, 1))(0, 0), 0.0);
}

TEST(Activations, SigmoidIsStableAtExtremes) {
  const double lo = mrcnn::sigmoid(-800.0);
  EXPECT_TRUE(std::isfinite(lo));
  EXPECT_GE(lo, 0.0);
  EXPECT_EQ(mrcnn::sigmoid(800.0), 1.0);
  EXPECT_NEAR(mrcnn::softplus(800.0), 800.0, 1e-12);
  EXPECT_TRUE(std::isfinite(mrcnn::softplus(-800.0)));
}

TEST(Activations, SoftmaxOfEqualColumnIsUniform) {
  const Matrix a = mrcnn::softmax_over_rows(Matrix(4, 2, 3.0));
  for (double v : a.values()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Activations, SoftmaxHandlesLargeValues) {
  const Matrix a = mrcnn::softmax_over_rows(Matrix{{1000.0}, {0.0}, {0.0}});
  EXPECT_NEAR(a(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(a(1, 0), 0.0, 1e-12);
  EXPECT_TRUE(mrcnn::all_finite(a));
}

TEST(Activations, SoftmaxColumnsSumToOneAndIgnoreColumnShift) {
  mrcnn::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = oracle::random_matrix(rng, 5, 3, 4.0);
    const Matrix a = mrcnn::softmax_over_rows(m);
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < 5; ++r) s += a(r, c);
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      const double shift = rng.uniform(-50, 50);
      for (std::size_t r = 0; r < 5; ++r) m(r, c) += shift;
    }
    EXPECT_LE(mrcnn::max_abs_diff(a, mrcnn::softmax_over_rows(m)), 1e-12);
  }
}

TEST(Activations, SoftmaxMasksTrailingRows) {
  const Matrix a = mrcnn::softmax_over_rows(Matrix{{1.0}, {1.0}, {9.0}}, 2);
  EXPECT_DOUBLE_EQ(a(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(a(1, 0), 0.5);
  EXPECT_EQ(a(2, 0), 0.0);
}

TEST(Dropout, ZeroRateAndInferenceAreIdentity) {
  mrcnn::Rng rng(1);
  const Matrix m = oracle::random_matrix(rng, 10, 10);
  for (auto [rate, training] : {std::pair{0.0, true}, std::pair{0.5, false}}) {
    const auto d = mrcnn::dropout(m, rate, training, rng);
    EXPECT_EQ(d.output, m);
    for (double v : d.mask.values()) EXPECT_EQ(v, 1.0);
  }
}

TEST(Dropout, DropFractionAndScaling) {
  mrcnn::Rng rng(2);
  const Matrix m(1000, 1000, 1.0);
  const auto d = mrcnn::dropout(m, 0.2, true, rng);
  std::size_t zeros = 0;
  for (double v : d.output.values()) {
    if (v == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(v, 1.25);
    }
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 1e6, 0.2, 0.003);
}
