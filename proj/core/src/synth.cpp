#include "mrcnn/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "mrcnn/errors.hpp"
#include "mrcnn/rng.hpp"

namespace mrcnn {
namespace {

std::string padded_name(char prefix, std::size_t index, std::size_t count) {
  const int width = static_cast<int>(std::to_string(count > 0 ? count - 1 : 0).size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, index);
  return buf;
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

std::vector<PlantedSpan> find_occurrences(const std::vector<std::string>& tokens,
                                          const std::vector<std::vector<std::string>>& patterns) {
  std::vector<PlantedSpan> spans;
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    const auto& p = patterns[j];
    if (p.size() > tokens.size()) continue;
    for (auto it = tokens.begin(); (it = std::search(it, tokens.end(), p.begin(), p.end())) != tokens.end(); ++it) {
      spans.push_back({static_cast<int>(j), static_cast<std::size_t>(it - tokens.begin()), p.size()});
    }
  }
  std::sort(spans.begin(), spans.end(), [](const PlantedSpan& a, const PlantedSpan& b) {
    return a.start != b.start ? a.start < b.start : a.label < b.label;
  });
  return spans;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_labels < 2) throw ConfigError("synth: num_labels must be at least 2");
  if (pattern_lengths.empty()) throw ConfigError("synth: pattern_lengths is empty");
  for (int len : pattern_lengths) {
    if (len < 1) throw ConfigError("synth: pattern lengths must be >= 1");
  }
  if (vocab_size < 2) throw ConfigError("synth: vocab_size must be at least 2");
  const int longest = *std::max_element(pattern_lengths.begin(), pattern_lengths.end());
  if (doc_length < longest) {
    throw ConfigError("synth: doc_length " + std::to_string(doc_length) +
                      " is shorter than the longest pattern (" + std::to_string(longest) + ")");
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0) || !(label_rate >= 0.0 && label_rate <= 1.0)) {
    throw ConfigError("synth: rates must be in [0, 1]");
  }
  if (dev_fraction < 0.0 || test_fraction < 0.0 || dev_fraction + test_fraction >= 1.0) {
    throw ConfigError("synth: dev/test fractions must be non-negative and sum below 1");
  }
}

SynthCorpus synth_corpus(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const auto vocab_size = static_cast<std::size_t>(config.vocab_size);
  std::vector<std::string> words(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) words[i] = padded_name('w', i, vocab_size);

  SynthCorpus corpus;
  const auto num_labels = static_cast<std::size_t>(config.num_labels);
  for (std::size_t j = 0; j < num_labels; ++j) {
    corpus.label_names.push_back(padded_name('L', j, num_labels));
    const auto len = static_cast<std::size_t>(
        config.pattern_lengths[j % config.pattern_lengths.size()]);
    std::vector<std::string> pattern(len);
    for (auto& w : pattern) w = words[rng.below(vocab_size)];
    corpus.patterns.push_back(std::move(pattern));
  }

  const auto doc_length = static_cast<std::size_t>(config.doc_length);
  std::vector<SynthDocument> all;
  all.reserve(config.num_docs);
  for (std::size_t d = 0; d < config.num_docs; ++d) {
    std::vector<std::vector<std::string>> segments;
    for (std::size_t j = 0; j < num_labels; ++j) {
      if (rng.bernoulli(config.label_rate)) segments.push_back(corpus.patterns[j]);
      if (rng.bernoulli(config.noise_rate)) {
        auto decoy = corpus.patterns[j];
        const std::size_t pos = rng.below(decoy.size());
        std::string replacement;
        do {
          replacement = words[rng.below(vocab_size)];
        } while (replacement == decoy[pos]);
        decoy[pos] = replacement;
        segments.push_back(std::move(decoy));
      }
    }
    shuffle(segments, rng);
    std::size_t used = 0;
    std::vector<std::vector<std::string>> kept;
    for (auto& s : segments) {
      if (used + s.size() > doc_length) continue;
      used += s.size();
      kept.push_back(std::move(s));
    }

    // Segments go into random gaps of the filler sequence, in kept order.
    const std::size_t filler = doc_length - used;
    std::vector<std::size_t> gaps(kept.size());
    for (auto& g : gaps) g = rng.below(filler + 1);
    std::sort(gaps.begin(), gaps.end());

    std::vector<std::string> tokens;
    tokens.reserve(doc_length);
    std::size_t next_segment = 0;
    for (std::size_t f = 0; f <= filler; ++f) {
      while (next_segment < kept.size() && gaps[next_segment] == f) {
        const auto& s = kept[next_segment++];
        tokens.insert(tokens.end(), s.begin(), s.end());
      }
      if (f < filler) tokens.push_back(words[rng.below(vocab_size)]);
    }

    SynthDocument sd;
    sd.doc.id = padded_name('d', d, config.num_docs);
    sd.spans = find_occurrences(tokens, corpus.patterns);
    std::vector<std::string> labels;
    for (const auto& span : sd.spans) labels.push_back(corpus.label_names[static_cast<std::size_t>(span.label)]);
    sd.doc.labels = normalize_labels(std::move(labels));
    sd.doc.tokens = std::move(tokens);
    all.push_back(std::move(sd));
  }

  const auto n = config.num_docs;
  const auto n_dev = static_cast<std::size_t>(static_cast<double>(n) * config.dev_fraction);
  const auto n_test = static_cast<std::size_t>(static_cast<double>(n) * config.test_fraction);
  const auto n_train = n - n_dev - n_test;
  auto move_range = [&all](std::size_t from, std::size_t to) {
    return std::vector<SynthDocument>(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(from)),
                                      std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(to)));
  };
  corpus.train = move_range(0, n_train);
  corpus.dev = move_range(n_train, n_train + n_dev);
  corpus.test = move_range(n_train + n_dev, n);
  return corpus;
}

std::vector<Document> documents_of(std::span<const SynthDocument> docs) {
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.doc);
  return out;
}

void write_synth_jsonl(std::span<const SynthDocument> docs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& d : docs) {
    std::string text;
    for (const auto& t : d.doc.tokens) {
      if (!text.empty()) text.push_back(' ');
      text += t;
    }
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : d.spans) spans.push_back({s.label, s.start, s.length});
    nlohmann::json record = {{"id", d.doc.id}, {"text", text}, {"labels", d.doc.labels}, {"spans", spans}};
    out << record.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace mrcnn
