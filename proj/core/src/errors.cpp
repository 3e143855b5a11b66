#include "mrcnn/errors.hpp"

#include <cstdlib>
#include <string_view>

namespace mrcnn {

bool finite_checks_enabled() {
  static const bool enabled = [] {
    const char* value = std::getenv("MRCNN_CHECK_FINITE");
    return value != nullptr && *value != '\0' && std::string_view(value) != "0";
  }();
  return enabled;
}

}  // namespace mrcnn
