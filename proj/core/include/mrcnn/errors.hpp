#pragma once

#include <stdexcept>
#include <string>

namespace mrcnn {

// Invalid configuration or hyper-parameters. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable, malformed or inconsistent input data. CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values during training or evaluation. CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes that do not line up. Always a programming or config bug.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// True when MRCNN_CHECK_FINITE is set to a non-empty value other than "0".
// Read once per process.
bool finite_checks_enabled();

}  // namespace mrcnn
