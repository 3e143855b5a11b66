#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrcnn/matrix.hpp"

namespace mrcnn {

// All metric functions take scores and targets as N x l matrices (documents by
// labels). Targets must be 0/1; anything else is a DataError. Mismatched
// shapes raise ShapeError.

struct F1Scores {
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;  // harmonic mean of macro precision and recall
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  double mean_label_f1 = 0.0;  // mean over labels of per-label F1
};

// A score at or above `threshold` is a positive prediction. Precision and
// recall are 0 when their denominator is 0; F1 is 0 when p + r = 0.
F1Scores f1_scores(const Matrix& scores, const Matrix& targets, double threshold = 0.5);

struct AucScores {
  // Mean over labels that have at least one positive and one negative.
  // Empty when no label qualifies.
  std::optional<double> macro;
  // Pooled over every (document, label) cell. Empty without both classes.
  std::optional<double> micro;
  std::size_t macro_labels = 0;
};

// ROC area as the probability that a positive outscores a negative, ties
// counting one half.
AucScores auc_scores(const Matrix& scores, const Matrix& targets);

// Area for a single list of scores; empty without both classes.
std::optional<double> binary_auc(std::span<const double> scores,
                                 std::span<const unsigned char> positive);

// Mean over documents of |top-K ∩ true| / K. Ties in score go to the lower
// label index. Requires 1 <= K <= l (ConfigError otherwise).
double precision_at_k(const Matrix& scores, const Matrix& targets, std::size_t k);

struct MetricsReport {
  std::optional<double> macro_auc;
  std::optional<double> micro_auc;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::optional<double> mean_label_f1;  // only when requested
  std::map<std::size_t, double> precision_at;
  std::size_t documents = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct EvalOptions {
  std::vector<std::size_t> ks{5, 8, 15};  // values above l are skipped
  double threshold = 0.5;
  bool mean_label_f1 = false;

  friend bool operator==(const EvalOptions&, const EvalOptions&) = default;
};

MetricsReport compute_metrics(const Matrix& scores, const Matrix& targets,
                              const EvalOptions& options = {});

// Keys: macro_auc, micro_auc (null when undefined), macro_f1, micro_f1,
// macro_precision, macro_recall, micro_precision, micro_recall,
// mean_label_f1 (if present), "p@K" per K, documents.
std::string to_json(const MetricsReport& report, int indent = -1);

}  // namespace mrcnn
