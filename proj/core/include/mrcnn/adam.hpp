#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mrcnn/matrix.hpp"

namespace mrcnn {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment accumulators mirroring a list of parameter tensors.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(std::span<const Matrix* const> params, AdamHyper hyper = {});

  std::int64_t step() const noexcept { return step_; }
  const AdamHyper& hyper() const noexcept { return hyper_; }
  const std::vector<Matrix>& first_moment() const noexcept { return m_; }
  const std::vector<Matrix>& second_moment() const noexcept { return v_; }

 private:
  friend void adam_step(std::span<Matrix* const>, std::span<const Matrix* const>,
                        AdamState&, double);
  AdamHyper hyper_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t step_ = 0;
};

// One bias-corrected Adam update:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
               AdamState& state, double lr);

}  // namespace mrcnn
