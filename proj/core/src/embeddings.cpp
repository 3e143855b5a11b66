#include "mrcnn/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "mrcnn/errors.hpp"
#include "mrcnn/rng.hpp"

namespace mrcnn {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::string EmbeddingMatrix::coverage_report() const {
  char buf[96];
  const double pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(covered) / static_cast<double>(total);
  std::snprintf(buf, sizeof buf, "%zu/%zu (%.1f%%)", covered, total, pct);
  return buf;
}

EmbeddingMatrix random_embeddings(std::size_t vocab_size, int dim, std::uint64_t seed) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
  EmbeddingMatrix e;
  e.rows = Matrix(vocab_size, static_cast<std::size_t>(dim));
  e.total = vocab_size >= 2 ? vocab_size - 2 : 0;
  Rng rng({seed, 0xE3BEDULL});
  for (std::size_t r = 1; r < vocab_size; ++r)
    for (auto& v : e.rows.row(r)) v = rng.uniform(-kMissingInitRange, kMissingInitRange);
  return e;
}

EmbeddingMatrix load_text_embeddings(const std::filesystem::path& path,
                                     const Vocabulary& vocab, int dim, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  auto where = [&path](std::size_t line) { return path.string() + ":" + std::to_string(line) + ": "; };

  std::string line;
  if (!std::getline(in, line)) throw DataError(where(1) + "missing header");
  const auto header = split_spaces(line);
  long long count = 0;
  long long file_dim = 0;
  if (header.size() != 2 ||
      std::from_chars(header[0].data(), header[0].data() + header[0].size(), count).ec != std::errc{} ||
      std::from_chars(header[1].data(), header[1].data() + header[1].size(), file_dim).ec != std::errc{}) {
    throw DataError(where(1) + "header must be \"count dim\"");
  }
  if (file_dim != dim) {
    throw DataError(where(1) + "embedding dimension " + std::to_string(file_dim) +
                    " does not match configured " + std::to_string(dim));
  }

  EmbeddingMatrix e = random_embeddings(vocab.size(), dim, seed);
  std::vector<bool> found(vocab.size(), false);
  std::vector<double> values(static_cast<std::size_t>(dim));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw DataError(where(line_no) + "expected " + std::to_string(dim) + " values, got " +
                      std::to_string(fields.size() - 1));
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!parse_double(fields[k + 1], values[k])) {
        throw DataError(where(line_no) + "cannot parse float '" + std::string(fields[k + 1]) + "'");
      }
    }
    const TokenId id = vocab.token_index(fields[0]);
    if (id == Vocabulary::kUnk) continue;
    const auto r = static_cast<std::size_t>(id);
    std::copy(values.begin(), values.end(), e.rows.row(r).begin());
    if (!found[r]) {
      found[r] = true;
      ++e.covered;
    }
  }
  e.source = EmbeddingSource::pretrained;
  return e;
}

void write_text_embeddings(const std::filesystem::path& path, const Matrix& rows,
                           const Vocabulary& vocab) {
  require_shape(rows, vocab.size(), rows.cols(), "write_text_embeddings");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << (vocab.size() - 2) << ' ' << rows.cols() << '\n';
  char buf[32];
  for (std::size_t r = 2; r < vocab.size(); ++r) {
    out << vocab.token(static_cast<TokenId>(r));
    for (double v : rows.row(r)) {
      std::snprintf(buf, sizeof buf, " %.9g", v);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace mrcnn
