#include "mrcnn/conv1d.hpp"

#include <algorithm>
#include <string>

#include "mrcnn/errors.hpp"

namespace mrcnn {
namespace {

void check_operands(const Matrix& x, const ConvSpec& spec, const Matrix& weight) {
  spec.validate();
  if (x.cols() != static_cast<std::size_t>(spec.in_channels)) {
    throw ShapeError("conv1d: input has " + std::to_string(x.cols()) +
                     " channels, spec expects " + std::to_string(spec.in_channels));
  }
  require_shape(weight, spec.weight_rows(), static_cast<std::size_t>(spec.out_channels),
                "conv1d weight");
}

}  // namespace

void ConvSpec::validate() const {
  if (kernel_size <= 0 || kernel_size % 2 == 0) {
    throw ConfigError("conv1d: kernel size must be positive and odd, got " +
                      std::to_string(kernel_size));
  }
  if (stride != 1) throw ConfigError("conv1d: only stride 1 is supported");
  if (in_channels <= 0 || out_channels <= 0) {
    throw ConfigError("conv1d: channel counts must be positive");
  }
}

Matrix conv1d_forward(const Matrix& x, const ConvSpec& spec, const Matrix& weight,
                      const Matrix& bias) {
  check_operands(x, spec, weight);
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const auto k = static_cast<std::ptrdiff_t>(spec.kernel_size);
  const auto pad = static_cast<std::ptrdiff_t>(spec.padding());
  const std::size_t cin = x.cols();
  const std::size_t cout = static_cast<std::size_t>(spec.out_channels);

  Matrix out(x.rows(), cout);
  if (spec.has_bias) {
    require_shape(bias, 1, cout, "conv1d bias");
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      auto o = out.row(static_cast<std::size_t>(j));
      std::copy(bias.values().begin(), bias.values().end(), o.begin());
    }
  }
  // Fixed summation order per output cell: window offset, then channel. The
  // in-range part of a window is one contiguous run of x, matching a
  // contiguous run of weight rows.
  const double* xd = x.data();
  const double* wd = weight.data();
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    double* o = out.row(static_cast<std::size_t>(j)).data();
    const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, pad - j);
    const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(k, n - j + pad);
    const std::size_t r0 = static_cast<std::size_t>(t0) * cin;
    const std::size_t r1 = static_cast<std::size_t>(t1) * cin;
    const std::size_t shift = static_cast<std::size_t>(j - pad + t0) * cin - r0;  // mod 2^64
    for (std::size_t r = r0; r < r1; ++r) {
      const double xv = xd[shift + r];
      const double* w = wd + r * cout;
      for (std::size_t q = 0; q < cout; ++q) o[q] += xv * w[q];
    }
  }
  check_finite(out, "conv1d_forward");
  return out;
}

void conv1d_backward_accumulate(const Matrix& x, const ConvSpec& spec,
                                const Matrix& weight, const Matrix& grad_out,
                                Matrix* grad_input, Matrix& grad_weight,
                                Matrix* grad_bias) {
  check_operands(x, spec, weight);
  require_shape(grad_out, x.rows(), static_cast<std::size_t>(spec.out_channels),
                "conv1d grad_out");
  require_shape(grad_weight, weight.rows(), weight.cols(), "conv1d grad_weight");
  if (grad_input != nullptr) require_shape(*grad_input, x.rows(), x.cols(), "conv1d grad_input");

  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const auto k = static_cast<std::ptrdiff_t>(spec.kernel_size);
  const auto pad = static_cast<std::ptrdiff_t>(spec.padding());
  const std::size_t cin = x.cols();
  const std::size_t cout = static_cast<std::size_t>(spec.out_channels);

  if (spec.has_bias && grad_bias != nullptr) {
    require_shape(*grad_bias, 1, cout, "conv1d grad_bias");
    double* gb = grad_bias->data();
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const double* g = grad_out.row(static_cast<std::size_t>(j)).data();
      for (std::size_t q = 0; q < cout; ++q) gb[q] += g[q];
    }
  }

  const double* xd = x.data();
  const double* wd = weight.data();
  double* gwd = grad_weight.data();
  double* gxd = grad_input != nullptr ? grad_input->data() : nullptr;
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const double* g = grad_out.row(static_cast<std::size_t>(j)).data();
    const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, pad - j);
    const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(k, n - j + pad);
    const std::size_t r0 = static_cast<std::size_t>(t0) * cin;
    const std::size_t r1 = static_cast<std::size_t>(t1) * cin;
    const std::size_t shift = static_cast<std::size_t>(j - pad + t0) * cin - r0;
    for (std::size_t r = r0; r < r1; ++r) {
      const double xv = xd[shift + r];
      const double* w = wd + r * cout;
      double* gw = gwd + r * cout;
      double acc = 0.0;
      for (std::size_t q = 0; q < cout; ++q) {
        gw[q] += xv * g[q];
        acc += w[q] * g[q];
      }
      if (gxd != nullptr) gxd[shift + r] += acc;
    }
  }
}

ConvGrads conv1d_backward(const Matrix& x, const ConvSpec& spec, const Matrix& weight,
                          const Matrix& grad_out) {
  ConvGrads grads{Matrix(x.rows(), x.cols()), Matrix(weight.rows(), weight.cols()),
                  spec.has_bias ? Matrix(1, static_cast<std::size_t>(spec.out_channels))
                                : Matrix()};
  conv1d_backward_accumulate(x, spec, weight, grad_out, &grads.input, grads.weight,
                             spec.has_bias ? &grads.bias : nullptr);
  return grads;
}

}  // namespace mrcnn
