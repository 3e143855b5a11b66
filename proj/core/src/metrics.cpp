#include "mrcnn/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <json.hpp>
#include <numeric>
#include <vector>

#include "mrcnn/errors.hpp"

namespace mrcnn {
namespace {

void check_inputs(const Matrix& scores, const Matrix& targets, const char* op) {
  if (!scores.same_shape(targets)) {
    throw ShapeError(std::string(op) + ": scores " + scores.shape_string() + " vs targets " +
                     targets.shape_string());
  }
  for (double v : targets.values()) {
    if (v != 0.0 && v != 1.0) throw DataError(std::string(op) + ": targets must be 0 or 1");
  }
  if (!all_finite(scores)) throw NumericError(std::string(op) + ": non-finite score");
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

F1Scores f1_scores(const Matrix& scores, const Matrix& targets, double threshold) {
  check_inputs(scores, targets, "f1_scores");
  const std::size_t n = scores.rows();
  const std::size_t l = scores.cols();
  std::vector<std::uint64_t> tp(l, 0), fp(l, 0), fn(l, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      const bool pred = scores(i, j) >= threshold;
      const bool gold = targets(i, j) == 1.0;
      if (pred && gold) ++tp[j];
      else if (pred) ++fp[j];
      else if (gold) ++fn[j];
    }
  }

  F1Scores out;
  std::uint64_t all_tp = 0, all_fp = 0, all_fn = 0;
  for (std::size_t j = 0; j < l; ++j) {
    const double p = ratio(tp[j], tp[j] + fp[j]);
    const double r = ratio(tp[j], tp[j] + fn[j]);
    out.macro_precision += p;
    out.macro_recall += r;
    out.mean_label_f1 += harmonic(p, r);
    all_tp += tp[j];
    all_fp += fp[j];
    all_fn += fn[j];
  }
  if (l > 0) {
    const auto dl = static_cast<double>(l);
    out.macro_precision /= dl;
    out.macro_recall /= dl;
    out.mean_label_f1 /= dl;
  }
  out.macro_f1 = harmonic(out.macro_precision, out.macro_recall);
  out.micro_precision = ratio(all_tp, all_tp + all_fp);
  out.micro_recall = ratio(all_tp, all_tp + all_fn);
  out.micro_f1 = harmonic(out.micro_precision, out.micro_recall);
  return out;
}

std::optional<double> binary_auc(std::span<const double> scores,
                                 std::span<const unsigned char> positive) {
  if (scores.size() != positive.size()) throw ShapeError("binary_auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U with midranks. Ranks are doubled so every quantity is an
  // integer and the sum is exact.
  std::uint64_t pos = 0;
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_mid = static_cast<std::uint64_t>(i + 1 + j);  // 2 * mean of i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        ++pos;
        twice_rank_sum += twice_mid;
      }
    }
    i = j;
  }
  const std::uint64_t neg = n - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  const std::uint64_t twice_u = twice_rank_sum - pos * (pos + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

AucScores auc_scores(const Matrix& scores, const Matrix& targets) {
  check_inputs(scores, targets, "auc_scores");
  const std::size_t n = scores.rows();
  const std::size_t l = scores.cols();
  AucScores out;
  double sum = 0.0;
  std::vector<double> col(n);
  std::vector<unsigned char> gold(n);
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = scores(i, j);
      gold[i] = targets(i, j) == 1.0;
    }
    if (const auto a = binary_auc(col, gold)) {
      sum += *a;
      ++out.macro_labels;
    }
  }
  if (out.macro_labels > 0) out.macro = sum / static_cast<double>(out.macro_labels);

  std::vector<unsigned char> pooled(scores.size());
  for (std::size_t k = 0; k < pooled.size(); ++k) pooled[k] = targets[k] == 1.0;
  out.micro = binary_auc(scores.values(), pooled);
  return out;
}

double precision_at_k(const Matrix& scores, const Matrix& targets, std::size_t k) {
  check_inputs(scores, targets, "precision_at_k");
  const std::size_t l = scores.cols();
  if (k == 0 || k > l) {
    throw ConfigError("precision_at_k: K=" + std::to_string(k) + " outside [1, " +
                      std::to_string(l) + "]");
  }
  if (scores.rows() == 0) return 0.0;
  std::vector<std::size_t> idx(l);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double sa = scores(i, a), sb = scores(i, b);
                        return sa != sb ? sa > sb : a < b;
                      });
    for (std::size_t t = 0; t < k; ++t) hits += targets(i, idx[t]) == 1.0;
  }
  return static_cast<double>(hits) / (static_cast<double>(k) * static_cast<double>(scores.rows()));
}

MetricsReport compute_metrics(const Matrix& scores, const Matrix& targets,
                              const EvalOptions& options) {
  const F1Scores f1 = f1_scores(scores, targets, options.threshold);
  const AucScores auc = auc_scores(scores, targets);
  MetricsReport r;
  r.macro_auc = auc.macro;
  r.micro_auc = auc.micro;
  r.macro_precision = f1.macro_precision;
  r.macro_recall = f1.macro_recall;
  r.macro_f1 = f1.macro_f1;
  r.micro_precision = f1.micro_precision;
  r.micro_recall = f1.micro_recall;
  r.micro_f1 = f1.micro_f1;
  if (options.mean_label_f1) r.mean_label_f1 = f1.mean_label_f1;
  for (std::size_t k : options.ks) {
    if (k >= 1 && k <= scores.cols()) r.precision_at[k] = precision_at_k(scores, targets, k);
  }
  r.documents = scores.rows();
  return r;
}

std::string to_json(const MetricsReport& r, int indent) {
  nlohmann::ordered_json j;
  auto opt = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["macro_auc"] = opt(r.macro_auc);
  j["micro_auc"] = opt(r.micro_auc);
  j["macro_f1"] = r.macro_f1;
  j["micro_f1"] = r.micro_f1;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["micro_precision"] = r.micro_precision;
  j["micro_recall"] = r.micro_recall;
  if (r.mean_label_f1) j["mean_label_f1"] = *r.mean_label_f1;
  for (const auto& [k, v] : r.precision_at) j["p@" + std::to_string(k)] = v;
  j["documents"] = r.documents;
  return j.dump(indent);
}

}  // namespace mrcnn
