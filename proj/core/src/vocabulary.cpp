#include "mrcnn/vocabulary.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <json.hpp>
#include <set>

#include "mrcnn/errors.hpp"

namespace mrcnn {
namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::span<const std::string> entries) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& e : entries) {
    for (char c : e) feed(static_cast<unsigned char>(c));
    feed('\n');
  }
  return h;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_lines(const std::filesystem::path& path, std::span<const std::string> lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::string> labels) {
  index_to_token_.reserve(tokens.size() + 2);
  index_to_token_.emplace_back(kPadToken);
  index_to_token_.emplace_back(kUnkToken);
  token_to_index_.emplace(std::string(kPadToken), kPad);
  token_to_index_.emplace(std::string(kUnkToken), kUnk);
  for (auto& t : tokens) {
    const auto index = static_cast<TokenId>(index_to_token_.size());
    if (!token_to_index_.emplace(t, index).second) {
      throw DataError("vocabulary: duplicate or reserved token '" + t + "'");
    }
    index_to_token_.push_back(std::move(t));
  }
  labels_ = std::move(labels);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!label_to_index_.emplace(labels_[i], static_cast<int>(i)).second) {
      throw DataError("vocabulary: duplicate label '" + labels_[i] + "'");
    }
  }
}

TokenId Vocabulary::token_index(std::string_view token) const {
  const auto it = token_to_index_.find(std::string(token));
  if (it == token_to_index_.end() || it->second < 2) return kUnk;
  return it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_index(token) != kUnk;
}

const std::string& Vocabulary::token(TokenId index) const {
  return index_to_token_.at(static_cast<std::size_t>(index));
}

std::optional<int> Vocabulary::label_index(std::string_view label) const {
  const auto it = label_to_index_.find(std::string(label));
  if (it == label_to_index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::label(int index) const {
  return labels_.at(static_cast<std::size_t>(index));
}

std::uint64_t Vocabulary::token_checksum() const { return fnv1a(index_to_token_); }
std::uint64_t Vocabulary::label_checksum() const { return fnv1a(labels_); }

void Vocabulary::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_lines(dir / "vocab.txt", index_to_token_);
  write_lines(dir / "labels.txt", labels_);
}

Vocabulary Vocabulary::load(const std::filesystem::path& dir) {
  auto lines = read_lines(dir / "vocab.txt");
  if (lines.size() < 2 || lines[0] != kPadToken || lines[1] != kUnkToken) {
    throw DataError((dir / "vocab.txt").string() +
                    ": first two lines must be <pad> and <unk>");
  }
  std::vector<std::string> tokens(std::make_move_iterator(lines.begin() + 2),
                                  std::make_move_iterator(lines.end()));
  return Vocabulary(std::move(tokens), read_lines(dir / "labels.txt"));
}

Vocabulary build_vocab(std::span<const Document> train_docs, int min_doc_freq) {
  if (train_docs.empty()) throw DataError("build_vocab: no training documents");
  std::map<std::string, int> doc_freq;
  std::set<std::string> labels;
  for (const auto& doc : train_docs) {
    std::set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    for (auto t : seen) ++doc_freq[std::string(t)];
    labels.insert(doc.labels.begin(), doc.labels.end());
  }
  std::vector<std::string> tokens;
  for (const auto& [token, count] : doc_freq) {
    if (count >= min_doc_freq) tokens.push_back(token);
  }
  if (tokens.empty()) {
    throw DataError("build_vocab: no token appears in at least " +
                    std::to_string(min_doc_freq) + " documents");
  }
  return Vocabulary(std::move(tokens), std::vector<std::string>(labels.begin(), labels.end()));
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "unknown";
}

EncodedExample encode(const Document& doc, const Vocabulary& vocab, Split split,
                      EncodeStats* stats) {
  EncodedExample ex;
  ex.id = doc.id;
  ex.tokens.reserve(doc.tokens.size());
  std::size_t unknown = 0;
  for (const auto& t : doc.tokens) {
    const TokenId id = vocab.token_index(t);
    unknown += id == Vocabulary::kUnk;
    ex.tokens.push_back(id);
  }
  ex.labels.assign(vocab.num_labels(), 0);
  std::size_t dropped = 0;
  for (const auto& label : doc.labels) {
    if (auto idx = vocab.label_index(label)) {
      ex.labels[static_cast<std::size_t>(*idx)] = 1;
    } else {
      ++dropped;
    }
  }
  if (split == Split::train && !doc.labels.empty() && dropped == doc.labels.size()) {
    throw DataError("document '" + doc.id + "': none of its labels is in the label space");
  }
  if (stats != nullptr) {
    stats->unknown_tokens += unknown;
    stats->dropped_labels += dropped;
  }
  return ex;
}

EncodedDataset encode_all(std::span<const Document> docs, const Vocabulary& vocab,
                          Split split, EncodeStats* stats) {
  EncodedDataset data{split, vocab.num_labels(), {}};
  data.examples.reserve(docs.size());
  for (const auto& doc : docs) data.examples.push_back(encode(doc, vocab, split, stats));
  return data;
}

void write_encoded(const EncodedDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& ex : data.examples) {
    std::vector<int> label_ids;
    for (std::size_t j = 0; j < ex.labels.size(); ++j)
      if (ex.labels[j] != 0) label_ids.push_back(static_cast<int>(j));
    json record = {{"id", ex.id}, {"token_ids", ex.tokens}, {"label_ids", label_ids}};
    out << record.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

EncodedDataset read_encoded(const std::filesystem::path& path, Split split,
                            const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  EncodedDataset data{split, vocab.num_labels(), {}};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    EncodedExample ex;
    try {
      const json record = json::parse(line);
      ex.id = record.at("id").get<std::string>();
      ex.tokens = record.at("token_ids").get<std::vector<TokenId>>();
      ex.labels.assign(vocab.num_labels(), 0);
      for (int j : record.at("label_ids").get<std::vector<int>>()) {
        if (j < 0 || static_cast<std::size_t>(j) >= vocab.num_labels()) fail("label id out of range");
        ex.labels[static_cast<std::size_t>(j)] = 1;
      }
    } catch (const json::exception& e) {
      fail(e.what());
    }
    if (ex.tokens.empty()) fail("empty token sequence");
    for (TokenId t : ex.tokens) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocab.size()) fail("token id out of range");
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

std::string checksum_hex(std::uint64_t checksum) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

}  // namespace mrcnn
