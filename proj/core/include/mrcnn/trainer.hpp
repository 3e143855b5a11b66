#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mrcnn/metrics.hpp"
#include "mrcnn/model_config.hpp"
#include "mrcnn/params.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {

enum class StopMetric { automatic, p_at_8, p_at_5, micro_f1, macro_f1 };

std::string_view to_string(StopMetric metric);
StopMetric stop_metric_from_string(std::string_view name);  // auto, p@8, p@5, micro_f1, macro_f1

// `automatic` picks P@8 above 50 labels and P@5 otherwise.
StopMetric resolve_stop_metric(StopMetric metric, std::size_t num_labels);
double metric_value(const MetricsReport& report, StopMetric metric);

struct TrainConfig {
  double lr = 1e-4;
  std::size_t batch_size = 16;
  int patience = 10;
  int max_epochs = 100;
  StopMetric early_stop_metric = StopMetric::automatic;
  std::uint64_t seed = 1;
  bool freeze_embeddings = false;
  EvalOptions eval;

  void validate() const;  // ConfigError naming the field

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean per-document loss over the epoch
  MetricsReport dev;
  double seconds = 0.0;
  double train_examples_per_sec = 0.0;
  double eval_examples_per_sec = 0.0;

  // {"epoch", "train_loss", "dev_metrics", "seconds", ...} on one line.
  std::string to_json() const;
};

struct TrainResult {
  ModelParams best_params;
  int best_epoch = 0;
  double best_metric = 0.0;
  StopMetric metric = StopMetric::p_at_5;
  std::vector<EpochRecord> log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam on the mean per-document summed BCE. After every epoch the
// dev set is scored; the parameters with the best early-stop metric (strictly
// greater than all before) are kept, and training ends after `patience`
// epochs in a row without improvement or at max_epochs.
// A non-finite batch loss aborts with NumericError.
TrainResult train(ModelParams params, const ModelConfig& config, const TrainConfig& train_config,
                  const EncodedDataset& train_set, const EncodedDataset& dev_set,
                  const EpochCallback& on_epoch = {});

}  // namespace mrcnn
