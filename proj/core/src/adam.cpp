#include "mrcnn/adam.hpp"

#include <cmath>

#include "mrcnn/errors.hpp"

namespace mrcnn {

AdamState::AdamState(std::span<const Matrix* const> params, AdamHyper hyper)
    : hyper_(hyper) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Matrix* p : params) {
    m_.emplace_back(p->rows(), p->cols());
    v_.emplace_back(p->rows(), p->cols());
  }
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m_.size()) {
    throw ShapeError("adam_step: parameter, gradient and state counts differ");
  }
  ++state.step_;
  const auto& h = state.hyper_;
  const double t = static_cast<double>(state.step_);
  const double correction1 = 1.0 - std::pow(h.beta1, t);
  const double correction2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    Matrix& m = state.m_[i];
    Matrix& v = state.v_[i];
    require_shape(g, p.rows(), p.cols(), "adam_step gradient");
    require_shape(m, p.rows(), p.cols(), "adam_step state");
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * g[j];
      v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
  }
}

}  // namespace mrcnn
