#include "mrcnn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mrcnn/errors.hpp"

namespace mrcnn {

std::string GradCheckResult::describe() const {
  std::ostringstream os;
  os << "max relative error " << max_relative_error << " over " << checked
     << " entries (worst: tensor " << worst_tensor << " offset " << worst_offset
     << ", analytic " << worst_analytic << ", numeric " << worst_numeric << ")";
  return os.str();
}

GradCheckResult grad_check(const std::function<double()>& loss,
                           std::span<Matrix* const> params,
                           std::span<const Matrix* const> analytic, double h) {
  if (params.size() != analytic.size()) {
    throw ShapeError("grad_check: parameter and gradient counts differ");
  }
  auto evaluate = [&loss] {
    const double value = loss();
    if (!std::isfinite(value)) throw NumericError("grad_check: loss is not finite");
    return value;
  };
  evaluate();

  GradCheckResult result;
  for (std::size_t t = 0; t < params.size(); ++t) {
    Matrix& p = *params[t];
    const Matrix& a = *analytic[t];
    require_shape(a, p.rows(), p.cols(), "grad_check gradient");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double original = p[i];
      p[i] = original + h;
      const double plus = evaluate();
      p[i] = original - h;
      const double minus = evaluate();
      p[i] = original;

      const double numeric = (plus - minus) / (2.0 * h);
      const double denom = std::max({std::abs(a[i]), std::abs(numeric), 1e-8});
      const double rel = std::abs(a[i] - numeric) / denom;
      ++result.checked;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_tensor = t;
        result.worst_offset = i;
        result.worst_analytic = a[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace mrcnn
