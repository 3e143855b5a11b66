#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "mrcnn/matrix.hpp"

namespace mrcnn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Location of the worst entry (tensor position in the list, flat offset).
  std::size_t worst_tensor = 0;
  std::size_t worst_offset = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  bool passed(double tolerance) const { return max_relative_error <= tolerance; }
  std::string describe() const;
};

// Compares analytic gradients with central differences
//   (f(p + h) - f(p - h)) / 2h
// entry by entry. `loss` must read the current values of `params`; entries are
// perturbed in place and restored bit-exactly. Relative error per entry is
// |a - n| / max(|a|, |n|, 1e-8). Throws NumericError on a non-finite loss.
GradCheckResult grad_check(const std::function<double()>& loss,
                           std::span<Matrix* const> params,
                           std::span<const Matrix* const> analytic, double h = 1e-6);

}  // namespace mrcnn
