#include "mrcnn/activations.hpp"

#include <algorithm>
#include <cmath>

#include "mrcnn/errors.hpp"

namespace mrcnn {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Matrix tanh_ew(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = std::tanh(m[i]);
  check_finite(out, "tanh");
  return out;
}

Matrix sigmoid_ew(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = sigmoid(m[i]);
  check_finite(out, "sigmoid");
  return out;
}

Matrix softmax_over_rows(const Matrix& m, std::size_t valid_rows) {
  const std::size_t n = std::min(valid_rows, m.rows());
  Matrix out(m.rows(), m.cols());
  if (n == 0) return out;
  std::vector<double> col_max(m.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) col_max[c] = std::max(col_max[c], m(r, c));
  std::vector<double> col_sum(m.cols(), 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double e = std::exp(m(r, c) - col_max[c]);
      out(r, c) = e;
      col_sum[c] += e;
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) /= col_sum[c];
  check_finite(out, "softmax_over_rows");
  return out;
}

DropoutResult dropout(const Matrix& m, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return {m, Matrix(m.rows(), m.cols(), 1.0)};
  const double keep_scale = 1.0 / (1.0 - rate);
  DropoutResult result{Matrix(m.rows(), m.cols()), Matrix(m.rows(), m.cols())};
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double mask = rng.uniform() < rate ? 0.0 : keep_scale;
    result.mask[i] = mask;
    result.output[i] = m[i] * mask;
  }
  return result;
}

void zero_rows_from(Matrix& m, std::size_t from) {
  for (std::size_t r = from; r < m.rows(); ++r) std::fill(m.row(r).begin(), m.row(r).end(), 0.0);
}

}  // namespace mrcnn
