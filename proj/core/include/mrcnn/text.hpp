#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrcnn {

inline constexpr std::size_t kDefaultMaxLength = 2500;

// One input record. `labels` is kept sorted and duplicate-free.
struct Document {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> labels;

  friend bool operator==(const Document&, const Document&) = default;
};

// Lowercases ASCII letters, splits into maximal runs of [a-z0-9] and drops
// runs without a letter ("2", "428"). Every other byte, including non-ASCII
// UTF-8 bytes, separates tokens.
std::vector<std::string> tokenize(std::string_view text);

// First min(tokens.size(), max_length) tokens.
std::vector<std::string> truncate(std::vector<std::string> tokens, std::size_t max_length);

// Sorts and deduplicates a label list.
std::vector<std::string> normalize_labels(std::vector<std::string> labels);

struct LoadStats {
  std::size_t lines = 0;
  std::size_t documents = 0;
  std::size_t skipped_empty = 0;  // no tokens left after preprocessing
};

// Reads one JSON object per line with keys "id", "labels" and either "text"
// (raw, tokenized here) or "tokens". Blank lines are ignored; documents left
// without tokens are skipped and counted. Throws DataError naming the line
// for malformed input.
std::vector<Document> load_jsonl(const std::filesystem::path& path,
                                 std::size_t max_length = kDefaultMaxLength,
                                 LoadStats* stats = nullptr);

// Writes {"id", "tokens", "labels"} objects, one per line.
void write_jsonl(std::span<const Document> docs, const std::filesystem::path& path);

}  // namespace mrcnn
