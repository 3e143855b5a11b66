#include "mrcnn/text.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "mrcnn/errors.hpp"

namespace mrcnn {
namespace {

using nlohmann::json;

std::string line_error(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  return path.string() + ":" + std::to_string(line) + ": " + what;
}

std::vector<std::string> string_array(const json& value, const char* key,
                                      const std::filesystem::path& path, std::size_t line) {
  if (!value.is_array()) throw DataError(line_error(path, line, std::string("\"") + key + "\" must be an array"));
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw DataError(line_error(path, line, std::string("\"") + key + "\" must hold strings"));
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool has_alpha = false;
  auto flush = [&] {
    if (!current.empty() && has_alpha) tokens.push_back(current);
    current.clear();
    has_alpha = false;
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
      has_alpha = true;
    } else if (c >= 'a' && c <= 'z') {
      current.push_back(static_cast<char>(c));
      has_alpha = true;
    } else if (c >= '0' && c <= '9') {
      current.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> truncate(std::vector<std::string> tokens, std::size_t max_length) {
  if (tokens.size() > max_length) tokens.resize(max_length);
  return tokens;
}

std::vector<std::string> normalize_labels(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

std::vector<Document> load_jsonl(const std::filesystem::path& path, std::size_t max_length,
                                 LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  LoadStats local;
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++local.lines;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(line_error(path, line_no, std::string("invalid JSON: ") + e.what()));
    }
    if (!record.is_object()) throw DataError(line_error(path, line_no, "expected a JSON object"));
    if (!record.contains("id")) throw DataError(line_error(path, line_no, "missing \"id\""));
    if (!record.contains("labels")) throw DataError(line_error(path, line_no, "missing \"labels\""));

    Document doc;
    const auto& id = record["id"];
    if (id.is_string()) {
      doc.id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      doc.id = std::to_string(id.get<long long>());
    } else {
      throw DataError(line_error(path, line_no, "\"id\" must be a string or integer"));
    }
    doc.labels = normalize_labels(string_array(record["labels"], "labels", path, line_no));

    if (record.contains("tokens")) {
      for (const auto& tok : string_array(record["tokens"], "tokens", path, line_no)) {
        auto pieces = tokenize(tok);
        doc.tokens.insert(doc.tokens.end(), pieces.begin(), pieces.end());
      }
    } else if (record.contains("text")) {
      if (!record["text"].is_string()) {
        throw DataError(line_error(path, line_no, "\"text\" must be a string"));
      }
      doc.tokens = tokenize(record["text"].get<std::string>());
    } else {
      throw DataError(line_error(path, line_no, "missing \"text\" or \"tokens\""));
    }
    doc.tokens = truncate(std::move(doc.tokens), max_length);
    if (doc.tokens.empty()) {
      ++local.skipped_empty;
      continue;
    }
    docs.push_back(std::move(doc));
  }
  local.documents = docs.size();
  if (stats != nullptr) *stats = local;
  return docs;
}

void write_jsonl(std::span<const Document> docs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& doc : docs) {
    json record = {{"id", doc.id}, {"tokens", doc.tokens}, {"labels", doc.labels}};
    out << record.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace mrcnn
