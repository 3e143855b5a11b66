#pragma once

#include <cstddef>
#include <limits>

#include "mrcnn/matrix.hpp"
#include "mrcnn/rng.hpp"

namespace mrcnn {

inline constexpr std::size_t kAllRows = std::numeric_limits<std::size_t>::max();

// Logistic function, split on sign so neither branch overflows exp().
double sigmoid(double x);
// log(1 + exp(x)) without overflow.
double softplus(double x);

Matrix tanh_ew(const Matrix& m);
Matrix sigmoid_ew(const Matrix& m);

// Normalizes every column over its rows: out(:, j) = softmax(m(:, j)).
// Only the first `valid_rows` rows take part; the remaining rows are set to 0.
Matrix softmax_over_rows(const Matrix& m, std::size_t valid_rows = kAllRows);

struct DropoutResult {
  Matrix output;
  Matrix mask;  // 0 for dropped entries, 1/(1-rate) for survivors.
};

// Inverted dropout. With training == false (or rate == 0) the input is
// returned unchanged with an all-ones mask.
DropoutResult dropout(const Matrix& m, double rate, bool training, Rng& rng);

// Zeroes rows [from, rows).
void zero_rows_from(Matrix& m, std::size_t from);

}  // namespace mrcnn
