#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mrcnn/errors.hpp"
#include "mrcnn/grad_check.hpp"

using mrcnn::Matrix;

TEST(GradCheck, QuadraticIsExact) {
  Matrix x{{0.3, -1.2, 2.0}};
  auto loss = [&] {
    double s = 0.0;
    for (double v : x.values()) s += v * v;
    return s;
  };
  Matrix g = x;
  g *= 2.0;
  std::vector<Matrix*> ps{&x};
  std::vector<const Matrix*> gs{&g};
  const auto r = mrcnn::grad_check(loss, ps, gs);
  EXPECT_LE(r.max_relative_error, 1e-9);
  EXPECT_EQ(r.checked, 3u);
  EXPECT_EQ(x, (Matrix{{0.3, -1.2, 2.0}}));  // restored
}

TEST(GradCheck, CorruptedGradientIsCaught) {
  Matrix x{{0.5, 1.5}};
  auto loss = [&] { return x[0] * x[0] + x[1] * x[1]; };
  Matrix g = x;
  g *= 4.0;  // twice the true gradient
  std::vector<Matrix*> ps{&x};
  std::vector<const Matrix*> gs{&g};
  const auto r = mrcnn::grad_check(loss, ps, gs);
  EXPECT_NEAR(r.max_relative_error, 0.5, 1e-6);
  EXPECT_FALSE(r.passed(1e-4));
}

TEST(GradCheck, NonFiniteLossThrows) {
  Matrix x{{1.0}};
  auto loss = [&] { return std::numeric_limits<double>::quiet_NaN(); };
  Matrix g{{0.0}};
  std::vector<Matrix*> ps{&x};
  std::vector<const Matrix*> gs{&g};
  EXPECT_THROW(mrcnn::grad_check(loss, ps, gs), mrcnn::NumericError);
}
