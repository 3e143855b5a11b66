#include <gtest/gtest.h>

#include <cmath>

#include "mrcnn/adam.hpp"

using mrcnn::Matrix;

namespace {

void step(Matrix& p, const Matrix& g, mrcnn::AdamState& s, double lr) {
  std::vector<Matrix*> ps{&p};
  std::vector<const Matrix*> gs{&g};
  mrcnn::adam_step(ps, gs, s, lr);
}

mrcnn::AdamState state_for(const Matrix& p) {
  std::vector<const Matrix*> ps{&p};
  return mrcnn::AdamState(ps);
}

}  // namespace

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  Matrix p{{1.0, -2.0}};
  auto s = state_for(p);
  step(p, Matrix(1, 2), s, 0.1);
  EXPECT_EQ(p, (Matrix{{1.0, -2.0}}));
  EXPECT_EQ(s.step(), 1);
}

TEST(Adam, FirstStepIsBiasCorrected) {
  Matrix p{{0.0}};
  auto s = state_for(p);
  step(p, Matrix{{1.0}}, s, 1e-4);
  EXPECT_NEAR(p(0, 0), -1e-4 / (1.0 + 1e-8), 1e-18);
}

TEST(Adam, ZeroLearningRateIsIdentity) {
  Matrix p{{0.3, 0.7}};
  auto s = state_for(p);
  for (int i = 0; i < 5; ++i) step(p, Matrix{{0.5, -1.0}}, s, 0.0);
  EXPECT_EQ(p, (Matrix{{0.3, 0.7}}));
  EXPECT_EQ(s.step(), 5);
}

TEST(Adam, MinimizesQuadratic) {
  Matrix x{{1.0}};
  auto s = state_for(x);
  for (int i = 0; i < 100; ++i) step(x, Matrix{{2.0 * x(0, 0)}}, s, 0.1);
  EXPECT_LT(std::abs(x(0, 0)), 0.1);
}

TEST(Adam, MomentShapesMirrorParameters) {
  Matrix a(2, 3), b(1, 4);
  std::vector<const Matrix*> ps{&a, &b};
  mrcnn::AdamState s(ps);
  ASSERT_EQ(s.first_moment().size(), 2u);
  EXPECT_TRUE(s.first_moment()[0].same_shape(a));
  EXPECT_TRUE(s.second_moment()[1].same_shape(b));
}
