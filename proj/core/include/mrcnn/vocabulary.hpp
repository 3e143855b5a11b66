#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mrcnn/text.hpp"

namespace mrcnn {

using TokenId = std::int32_t;

// Token and label index maps. Token indices 0 and 1 are reserved for padding
// and unknown words; corpus tokens start at 2. Labels occupy [0, num_labels).
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary() : Vocabulary({}, {}) {}
  // `tokens` excludes the reserved entries. Duplicates or reserved names are
  // rejected with DataError.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::string> labels);

  // Including PAD and UNK.
  std::size_t size() const noexcept { return index_to_token_.size(); }
  std::size_t num_labels() const noexcept { return labels_.size(); }

  TokenId token_index(std::string_view token) const;  // kUnk when absent
  bool contains(std::string_view token) const;
  const std::string& token(TokenId index) const;
  std::optional<int> label_index(std::string_view label) const;
  const std::string& label(int index) const;

  std::span<const std::string> tokens() const noexcept { return index_to_token_; }
  std::span<const std::string> labels() const noexcept { return labels_; }

  // FNV-1a 64 over the entries in index order, each followed by '\n'.
  std::uint64_t token_checksum() const;
  std::uint64_t label_checksum() const;

  // vocab.txt: "<pad>", "<unk>", then one token per line (line number =
  // index). labels.txt: one label per line (line number = label index).
  void save(const std::filesystem::path& dir) const;
  static Vocabulary load(const std::filesystem::path& dir);

 private:
  std::vector<std::string> index_to_token_;
  std::unordered_map<std::string, TokenId> token_to_index_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> label_to_index_;
};

inline constexpr int kDefaultMinDocFreq = 3;

// Keeps tokens that occur in at least `min_doc_freq` distinct documents,
// sorted lexicographically. Labels are the sorted union of training labels.
// Throws DataError if the corpus is empty or no token qualifies.
Vocabulary build_vocab(std::span<const Document> train_docs,
                       int min_doc_freq = kDefaultMinDocFreq);

enum class Split { train, dev, test };
std::string_view to_string(Split split);

struct EncodedExample {
  std::string id;
  std::vector<TokenId> tokens;
  std::vector<std::uint8_t> labels;  // binary, length num_labels

  friend bool operator==(const EncodedExample&, const EncodedExample&) = default;
};

struct EncodedDataset {
  Split split = Split::train;
  std::size_t num_labels = 0;
  std::vector<EncodedExample> examples;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
};

struct EncodeStats {
  std::size_t unknown_tokens = 0;
  std::size_t dropped_labels = 0;  // labels outside the training label space
};

// Maps tokens to indices (unknown -> kUnk) and labels to a binary vector.
// Unseen labels are dropped and counted; a training document whose labels are
// all unseen is a DataError.
EncodedExample encode(const Document& doc, const Vocabulary& vocab, Split split,
                      EncodeStats* stats = nullptr);
EncodedDataset encode_all(std::span<const Document> docs, const Vocabulary& vocab,
                          Split split, EncodeStats* stats = nullptr);

// One {"id", "token_ids", "label_ids"} object per line.
void write_encoded(const EncodedDataset& data, const std::filesystem::path& path);
EncodedDataset read_encoded(const std::filesystem::path& path, Split split,
                            const Vocabulary& vocab);

std::string checksum_hex(std::uint64_t checksum);

}  // namespace mrcnn
