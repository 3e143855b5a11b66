#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mrcnn/text.hpp"

namespace mrcnn {

// Planted-pattern corpus: label j owns a fixed random token n-gram and a
// document carries label j exactly when that n-gram occurs contiguously in it.
struct SynthConfig {
  std::size_t num_docs = 1000;
  int num_labels = 20;
  std::vector<int> pattern_lengths{2, 5, 9, 15, 19};
  int vocab_size = 500;
  int doc_length = 100;
  // Per label and document, probability of planting a decoy: a copy of the
  // label's pattern with one position replaced. Decoys never carry the label.
  double noise_rate = 0.1;
  std::uint64_t seed = 1;
  // Per label and document, probability of planting the real pattern.
  double label_rate = 0.15;
  double dev_fraction = 0.1;
  double test_fraction = 0.1;

  void validate() const;
};

struct PlantedSpan {
  int label = 0;
  std::size_t start = 0;
  std::size_t length = 0;
};

struct SynthDocument {
  Document doc;
  std::vector<PlantedSpan> spans;  // every occurrence of every label pattern
};

struct SynthCorpus {
  std::vector<std::vector<std::string>> patterns;  // indexed by label
  std::vector<std::string> label_names;
  std::vector<SynthDocument> train;
  std::vector<SynthDocument> dev;
  std::vector<SynthDocument> test;
};

// Pure function of the config (including seed).
SynthCorpus synth_corpus(const SynthConfig& config);

std::vector<Document> documents_of(std::span<const SynthDocument> docs);

// Raw-text JSONL: {"id", "text", "labels", "spans": [[label, start, length], ...]}.
void write_synth_jsonl(std::span<const SynthDocument> docs, const std::filesystem::path& path);

}  // namespace mrcnn
