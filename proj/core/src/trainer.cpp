#include "mrcnn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <sstream>

#include "mrcnn/adam.hpp"
#include "mrcnn/batching.hpp"
#include "mrcnn/errors.hpp"
#include "mrcnn/model.hpp"
#include "mrcnn/rng.hpp"

namespace mrcnn {
namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string norms(const ModelParams& params) {
  std::ostringstream out;
  params.for_each([&](const std::string& name, const Matrix& m) {
    double sq = 0.0;
    bool finite = true;
    for (double v : m.values()) {
      finite = finite && std::isfinite(v);
      sq += v * v;
    }
    out << "\n  " << name << " " << m.shape_string() << " |.|=" << std::sqrt(sq)
        << (finite ? "" : " NON-FINITE");
  });
  return out.str();
}

}  // namespace

std::string_view to_string(StopMetric metric) {
  switch (metric) {
    case StopMetric::automatic: return "auto";
    case StopMetric::p_at_8: return "p@8";
    case StopMetric::p_at_5: return "p@5";
    case StopMetric::micro_f1: return "micro_f1";
    case StopMetric::macro_f1: return "macro_f1";
  }
  return "auto";
}

StopMetric stop_metric_from_string(std::string_view name) {
  for (auto m : {StopMetric::automatic, StopMetric::p_at_8, StopMetric::p_at_5,
                 StopMetric::micro_f1, StopMetric::macro_f1}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("early_stop_metric: unknown value '" + std::string(name) +
                    "' (expected auto, p@8, p@5, micro_f1 or macro_f1)");
}

StopMetric resolve_stop_metric(StopMetric metric, std::size_t num_labels) {
  if (metric != StopMetric::automatic) return metric;
  return num_labels > 50 ? StopMetric::p_at_8 : StopMetric::p_at_5;
}

double metric_value(const MetricsReport& report, StopMetric metric) {
  auto p_at = [&](std::size_t k) {
    const auto it = report.precision_at.find(k);
    if (it == report.precision_at.end()) {
      throw ConfigError("early_stop_metric p@" + std::to_string(k) +
                        " needs at least " + std::to_string(k) + " labels");
    }
    return it->second;
  };
  switch (metric) {
    case StopMetric::p_at_8: return p_at(8);
    case StopMetric::p_at_5: return p_at(5);
    case StopMetric::micro_f1: return report.micro_f1;
    case StopMetric::macro_f1: return report.macro_f1;
    case StopMetric::automatic: break;
  }
  throw ConfigError("metric_value: unresolved early_stop_metric");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (!(eval.threshold >= 0.0 && eval.threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [0, 1]");
  }
}

std::string EpochRecord::to_json() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["train_loss"] = train_loss;
  j["dev_metrics"] = nlohmann::ordered_json::parse(mrcnn::to_json(dev));
  j["seconds"] = seconds;
  j["train_examples_per_sec"] = train_examples_per_sec;
  j["eval_examples_per_sec"] = eval_examples_per_sec;
  return j.dump();
}

TrainResult train(ModelParams params, const ModelConfig& config, const TrainConfig& tc,
                  const EncodedDataset& train_set, const EncodedDataset& dev_set,
                  const EpochCallback& on_epoch) {
  config.validate();
  tc.validate();
  if (train_set.empty()) throw DataError("train: training set is empty");
  if (dev_set.empty()) throw DataError("train: dev set is empty");
  if (train_set.num_labels != static_cast<std::size_t>(config.num_labels) ||
      dev_set.num_labels != train_set.num_labels) {
    throw DataError("train: dataset label count does not match the model");
  }

  TrainResult result;
  result.metric = resolve_stop_metric(tc.early_stop_metric, train_set.num_labels);

  std::vector<Matrix*> trainable = params.tensors();
  ModelParams grad = ModelParams::zeros(config, params.embedding.rows());
  std::vector<const Matrix*> grad_views;
  for (Matrix* g : grad.tensors()) grad_views.push_back(g);
  if (tc.freeze_embeddings) {
    trainable.erase(trainable.begin());
    grad_views.erase(grad_views.begin());
  }
  std::vector<const Matrix*> trainable_c(trainable.begin(), trainable.end());
  AdamState adam(trainable_c);
  const bool check = finite_checks_enabled();

  int since_best = 0;
  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    const auto t_epoch = Clock::now();
    const auto batches = make_batches(train_set, tc.batch_size, tc.seed,
                                      static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const Batch& batch = batches[bi];
      std::vector<Gradients> per_doc(batch.size());
      std::exception_ptr error;
      const auto bn = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < bn; ++i) {
        try {
          const auto k = static_cast<std::size_t>(i);
          const auto& ex = train_set.examples[batch.indices[k]];
          ForwardOptions opts;
          opts.training = true;
          opts.valid_length = batch.lengths[k];
          opts.dropout_seed = mix_seed({tc.seed, static_cast<std::uint64_t>(epoch),
                                        static_cast<std::uint64_t>(batch.indices[k])});
          const auto trace = forward(batch.tokens[k], params, config, opts);
          per_doc[k] = backward(trace, ex.labels, params, config);
        } catch (...) {
#pragma omp critical
          if (!error) error = std::current_exception();
        }
      }
      if (error) std::rethrow_exception(error);

      // Reduce in batch order so the result is independent of scheduling.
      grad.set_zero();
      double batch_loss = 0.0;
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (std::size_t k = 0; k < per_doc.size(); ++k) {
        if (!std::isfinite(per_doc[k].loss)) {
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(bi) + ", document '" +
                             train_set.examples[batch.indices[k]].id + "'; parameters:" +
                             norms(params));
        }
        batch_loss += per_doc[k].loss;
        per_doc[k].add_to(grad, scale);
      }
      loss_sum += batch_loss;
      adam_step(trainable, grad_views, adam, tc.lr);
      if (check) {
        for (const Matrix* p : trainable) {
          if (!all_finite(*p)) {
            throw NumericError("non-finite parameter after epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(bi) + "; parameters:" + norms(params));
          }
        }
      }
    }
    const double train_seconds = since(t_epoch);

    const auto t_eval = Clock::now();
    const Matrix scores = predict(params, config, dev_set, tc.batch_size);
    EpochRecord rec;
    rec.dev = compute_metrics(scores, target_matrix(dev_set), tc.eval);
    const double eval_seconds = since(t_eval);
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.seconds = since(t_epoch);
    rec.train_examples_per_sec =
        train_seconds > 0 ? static_cast<double>(train_set.size()) / train_seconds : 0.0;
    rec.eval_examples_per_sec =
        eval_seconds > 0 ? static_cast<double>(dev_set.size()) / eval_seconds : 0.0;

    const double value = metric_value(rec.dev, result.metric);
    if (epoch == 1 || value > result.best_metric) {
      result.best_metric = value;
      result.best_epoch = epoch;
      result.best_params = params;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (since_best >= tc.patience) break;
  }
  return result;
}

}  // namespace mrcnn
