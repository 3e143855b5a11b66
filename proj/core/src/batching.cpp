#include "mrcnn/batching.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

#include "mrcnn/errors.hpp"
#include "mrcnn/model.hpp"
#include "mrcnn/rng.hpp"

namespace mrcnn {
namespace {

std::vector<Batch> group(const EncodedDataset& data, const std::vector<std::size_t>& order,
                         std::size_t batch_size) {
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    Batch b;
    const std::size_t end = std::min(order.size(), start + batch_size);
    for (std::size_t i = start; i < end; ++i) {
      b.indices.push_back(order[i]);
      b.lengths.push_back(data.examples[order[i]].tokens.size());
      b.max_length = std::max(b.max_length, b.lengths.back());
    }
    for (std::size_t idx : b.indices) {
      auto toks = data.examples[idx].tokens;
      toks.resize(b.max_length, Vocabulary::kPad);
      b.tokens.push_back(std::move(toks));
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

void check(const EncodedDataset& data, std::size_t batch_size) {
  if (data.empty()) throw DataError("make_batches: dataset is empty");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
}

template <class Fn>
Matrix predict_each(const EncodedDataset& data, std::size_t num_labels, Fn&& fn) {
  Matrix out(data.size(), num_labels);
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const std::vector<double> p = fn(static_cast<std::size_t>(i));
      std::copy(p.begin(), p.end(), out.row(static_cast<std::size_t>(i)).begin());
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace

std::vector<Batch> make_batches(const EncodedDataset& data, std::size_t batch_size,
                                std::uint64_t seed, std::uint64_t epoch) {
  check(data, batch_size);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng({seed, epoch, 0xBA7C});
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  return group(data, order, batch_size);
}

std::vector<Batch> make_sequential_batches(const EncodedDataset& data, std::size_t batch_size) {
  check(data, batch_size);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return group(data, order, batch_size);
}

Matrix predict(const ModelParams& params, const ModelConfig& config, const EncodedDataset& data,
               std::size_t batch_size) {
  const auto batches = make_sequential_batches(data, batch_size);
  // Map each document to its padded sequence.
  std::vector<std::pair<const std::vector<TokenId>*, std::size_t>> padded(data.size());
  for (const auto& b : batches) {
    for (std::size_t i = 0; i < b.size(); ++i) padded[b.indices[i]] = {&b.tokens[i], b.lengths[i]};
  }
  return predict_each(data, static_cast<std::size_t>(config.num_labels), [&](std::size_t i) {
    ForwardOptions opts;
    opts.valid_length = padded[i].second;
    return forward(*padded[i].first, params, config, opts).probabilities;
  });
}

Matrix predict_unbatched(const ModelParams& params, const ModelConfig& config,
                         const EncodedDataset& data) {
  return predict_each(data, static_cast<std::size_t>(config.num_labels), [&](std::size_t i) {
    return forward(data.examples[i].tokens, params, config).probabilities;
  });
}

Matrix target_matrix(const EncodedDataset& data) {
  Matrix y(data.size(), data.num_labels);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& labels = data.examples[i].labels;
    if (labels.size() != data.num_labels) throw DataError("target_matrix: label vector length");
    for (std::size_t j = 0; j < labels.size(); ++j) y(i, j) = labels[j];
  }
  return y;
}

}  // namespace mrcnn
