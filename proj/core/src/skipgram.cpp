#include "mrcnn/skipgram.hpp"

#include <algorithm>
#include <cmath>

#include "mrcnn/activations.hpp"
#include "mrcnn/errors.hpp"
#include "mrcnn/rng.hpp"

namespace mrcnn {
namespace {

bool trainable(TokenId t) { return t != Vocabulary::kPad && t != Vocabulary::kUnk; }

// Cumulative unigram^0.75 distribution over token ids.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::vector<TokenId>> corpus, std::size_t vocab_size)
      : cumulative_(vocab_size, 0.0) {
    std::vector<double> counts(vocab_size, 0.0);
    for (const auto& seq : corpus)
      for (TokenId t : seq)
        if (trainable(t)) counts[static_cast<std::size_t>(t)] += 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i < vocab_size; ++i) {
      total += std::pow(counts[i], 0.75);
      cumulative_[i] = total;
    }
    total_ = total;
  }

  TokenId draw(Rng& rng) const {
    const double u = rng.uniform() * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                           cumulative_.size() - 1);
    return static_cast<TokenId>(idx);
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace

Matrix pretrain_skipgram(std::span<const std::vector<TokenId>> corpus,
                         std::size_t vocab_size, const SkipGramConfig& config) {
  if (config.dim <= 0 || config.window <= 0 || config.negatives < 0 || config.epochs < 0) {
    throw ConfigError("skip-gram: dim and window must be positive, negatives and epochs non-negative");
  }
  if (corpus.empty()) throw DataError("skip-gram: empty corpus");
  const bool any_long = std::any_of(corpus.begin(), corpus.end(), [&](const auto& s) {
    return s.size() > static_cast<std::size_t>(config.window);
  });
  if (!any_long) {
    throw DataError("skip-gram: window " + std::to_string(config.window) +
                    " is not shorter than any sequence");
  }

  const auto dim = static_cast<std::size_t>(config.dim);
  Rng rng({config.seed, 0x5C1B6ULL});
  Matrix input(vocab_size, dim);
  Matrix output(vocab_size, dim);
  const double init = 0.5 / static_cast<double>(dim);
  for (std::size_t r = 2; r < vocab_size; ++r)
    for (auto& v : input.row(r)) v = rng.uniform(-init, init);
  if (config.epochs == 0) return input;

  const NegativeSampler sampler(corpus, vocab_size);
  std::size_t tokens_per_epoch = 0;
  for (const auto& seq : corpus) tokens_per_epoch += seq.size();
  const double total_steps = static_cast<double>(tokens_per_epoch) * config.epochs;
  const double min_lr = config.lr * 1e-4;

  std::vector<double> accum(dim);
  std::size_t processed = 0;
  auto update = [&](std::size_t center, std::size_t target, double label, double lr) {
    double* v = input.row(center).data();
    double* u = output.row(target).data();
    double dot = 0.0;
    for (std::size_t k = 0; k < dim; ++k) dot += v[k] * u[k];
    const double g = (label - sigmoid(dot)) * lr;
    for (std::size_t k = 0; k < dim; ++k) {
      accum[k] += g * u[k];
      u[k] += g * v[k];
    }
  };

  const auto window = static_cast<std::ptrdiff_t>(config.window);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& seq : corpus) {
      const auto n = static_cast<std::ptrdiff_t>(seq.size());
      for (std::ptrdiff_t i = 0; i < n; ++i, ++processed) {
        const TokenId center = seq[static_cast<std::size_t>(i)];
        if (!trainable(center)) continue;
        const double lr = std::max(min_lr, config.lr * (1.0 - static_cast<double>(processed) / total_steps));
        const auto c = static_cast<std::size_t>(center);
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - window);
             j <= std::min(n - 1, i + window); ++j) {
          const TokenId context = seq[static_cast<std::size_t>(j)];
          if (j == i || !trainable(context)) continue;
          std::fill(accum.begin(), accum.end(), 0.0);
          update(c, static_cast<std::size_t>(context), 1.0, lr);
          for (int k = 0; k < config.negatives; ++k) {
            const TokenId neg = sampler.draw(rng);
            if (neg == context) continue;
            update(c, static_cast<std::size_t>(neg), 0.0, lr);
          }
          double* v = input.row(c).data();
          for (std::size_t k = 0; k < dim; ++k) v[k] += accum[k];
        }
      }
    }
  }
  return input;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace mrcnn
