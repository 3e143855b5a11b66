#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "mrcnn/matrix.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {

enum class EmbeddingSource { pretrained, random };

// |vocab| x d_e lookup table. Row Vocabulary::kPad is always zero.
struct EmbeddingMatrix {
  Matrix rows;
  EmbeddingSource source = EmbeddingSource::random;
  std::size_t covered = 0;  // corpus tokens found in the file
  std::size_t total = 0;    // corpus tokens (PAD and UNK excluded)

  // "covered/total (pct%)"
  std::string coverage_report() const;
};

inline constexpr double kMissingInitRange = 0.1;

// Every row except PAD uniform in [-0.1, 0.1].
EmbeddingMatrix random_embeddings(std::size_t vocab_size, int dim, std::uint64_t seed);

// word2vec text format: "count dim" header, then "token v1 ... v_dim" lines.
// Vocabulary tokens present in the file take the file vector; the rest (and
// UNK) are drawn as in random_embeddings. Throws DataError on a header dim
// different from `dim`, a short or long vector line, or an unparsable float,
// naming the line.
EmbeddingMatrix load_text_embeddings(const std::filesystem::path& path,
                                     const Vocabulary& vocab, int dim, std::uint64_t seed);

// Writes rows 2.. (corpus tokens) in the text format with 9 significant digits.
void write_text_embeddings(const std::filesystem::path& path, const Matrix& rows,
                           const Vocabulary& vocab);

}  // namespace mrcnn
