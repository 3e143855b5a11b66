#include "mrcnn/model_config.hpp"

#include <algorithm>
#include <set>

#include "mrcnn/errors.hpp"

namespace mrcnn {

std::string_view to_string(OutputMode mode) {
  return mode == OutputMode::per_label ? "per_label" : "literal_row_sum";
}

OutputMode output_mode_from_string(std::string_view name) {
  if (name == "per_label") return OutputMode::per_label;
  if (name == "literal_row_sum") return OutputMode::literal_row_sum;
  throw ConfigError("output_mode: expected per_label or literal_row_sum, got '" +
                    std::string(name) + "'");
}

std::size_t ModelConfig::output_channels() const noexcept {
  if (channel_schedule.size() > 1) return static_cast<std::size_t>(channel_schedule.back());
  return static_cast<std::size_t>(filter_channels);
}

void ModelConfig::validate() const {
  if (kernel_sizes.empty()) throw ConfigError("kernel_sizes: at least one kernel is required");
  std::set<int> seen;
  for (int k : kernel_sizes) {
    if (k <= 0 || k % 2 == 0) {
      throw ConfigError("kernel_sizes: kernel sizes must be positive and odd, got " + std::to_string(k));
    }
    if (!seen.insert(k).second) {
      throw ConfigError("kernel_sizes: duplicate kernel size " + std::to_string(k));
    }
  }
  if (filter_channels <= 0) throw ConfigError("filter_channels: must be positive");
  if (channel_schedule.empty() || channel_schedule.front() != filter_channels) {
    throw ConfigError("channel_schedule: must start with filter_channels (" +
                      std::to_string(filter_channels) + ")");
  }
  if (std::any_of(channel_schedule.begin(), channel_schedule.end(), [](int c) { return c <= 0; })) {
    throw ConfigError("channel_schedule: widths must be positive");
  }
  if (num_labels <= 0) throw ConfigError("num_labels: must be positive");
  if (embed_dim <= 0) throw ConfigError("embed_dim: must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout: must be in [0, 1)");
}

ModelConfig apply_preset(std::string_view name, ModelConfig base) {
  base.embed_dim = 100;
  base.filter_channels = 100;
  base.dropout_rate = 0.2;
  const std::vector<int> all_kernels{3, 5, 9, 15, 19, 25};
  if (name == "cnn") {
    base.kernel_sizes = {9};
    base.channel_schedule = {100};
  } else if (name == "multicnn-3") {
    base.kernel_sizes = {5, 9, 15};
    base.channel_schedule = {100};
  } else if (name == "multicnn-5") {
    base.kernel_sizes = {3, 5, 9, 15, 19};
    base.channel_schedule = {100};
  } else if (name == "multicnn") {
    base.kernel_sizes = all_kernels;
    base.channel_schedule = {100};
  } else if (name == "rescnn" || name == "rescnn-1") {
    base.kernel_sizes = {9};
    base.channel_schedule = {100, 50};
  } else if (name == "rescnn-2") {
    base.kernel_sizes = {9};
    base.channel_schedule = {100, 100, 50};
  } else if (name == "rescnn-3") {
    base.kernel_sizes = {9};
    base.channel_schedule = {100, 150, 100, 50};
  } else if (name == "multirescnn") {
    base.kernel_sizes = all_kernels;
    base.channel_schedule = {100, 50};
  } else {
    throw ConfigError("preset: unknown preset '" + std::string(name) + "'");
  }
  return base;
}

std::vector<std::string> preset_names() {
  return {"cnn", "multicnn-3", "multicnn-5", "multicnn", "rescnn", "rescnn-1",
          "rescnn-2", "rescnn-3", "multirescnn"};
}

}  // namespace mrcnn
