#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mrcnn {

enum class OutputMode {
  // logit_i = V(i, :) . W(:, i) + b_i, one output weight vector per label.
  per_label,
  // logit_i = sum_j (V W)(i, j) + b_i, the plain sum-pooling of V W. It
  // collapses W to the shared vector W * 1.
  literal_row_sum,
};

std::string_view to_string(OutputMode mode);
OutputMode output_mode_from_string(std::string_view name);  // ConfigError if unknown

// Architecture hyper-parameters. m = kernel_sizes.size() parallel filters of
// width filter_channels, each followed by p = channel_schedule.size() - 1
// residual blocks whose widths follow channel_schedule (schedule[0] is the
// filter width). p = 0 gives the plain multi-filter model.
struct ModelConfig {
  std::vector<int> kernel_sizes{3, 5, 9, 15, 19, 25};
  int filter_channels = 100;
  std::vector<int> channel_schedule{100, 50};
  int num_labels = 0;
  int embed_dim = 100;
  double dropout_rate = 0.2;
  OutputMode output_mode = OutputMode::per_label;
  bool use_bias = true;
  // Restrict convolutions and attention to a sequence's own positions when it
  // is padded inside a batch.
  bool mask_padding = true;

  std::size_t num_filters() const noexcept { return kernel_sizes.size(); }
  std::size_t residual_blocks() const noexcept {
    return channel_schedule.empty() ? 0 : channel_schedule.size() - 1;
  }
  // d^p, or d_f when there are no residual blocks.
  std::size_t output_channels() const noexcept;
  // Columns of the concatenated feature matrix H: m * d^p.
  std::size_t feature_width() const noexcept { return num_filters() * output_channels(); }

  // Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Architecture presets for the CNN / MultiCNN / ResCNN / MultiResCNN variants:
//   cnn          k = 9,                  p = 0
//   multicnn-3   k = 5,9,15              p = 0
//   multicnn-5   k = 3,5,9,15,19         p = 0
//   multicnn     k = 3,5,9,15,19,25      p = 0
//   rescnn       k = 9, p = 1, d = 100,50        (alias rescnn-1)
//   rescnn-2     k = 9, p = 2, d = 100,100,50
//   rescnn-3     k = 9, p = 3, d = 100,150,100,50
//   multirescnn  k = 3,5,9,15,19,25, p = 1, d = 100,50
// All use d_e = 100, d_f = 100, dropout 0.2. num_labels is left untouched.
ModelConfig apply_preset(std::string_view name, ModelConfig base = {});
std::vector<std::string> preset_names();

}  // namespace mrcnn
