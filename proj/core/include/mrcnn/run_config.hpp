#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrcnn/model_config.hpp"
#include "mrcnn/skipgram.hpp"
#include "mrcnn/text.hpp"
#include "mrcnn/trainer.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {

// Everything a CLI run needs. num_labels is never configured; it comes from
// the data.
struct RunConfig {
  std::string preset;
  ModelConfig model;
  TrainConfig train;
  int threads = 0;  // 0 keeps the OpenMP default
  std::size_t max_len = kDefaultMaxLength;
  int min_doc_freq = kDefaultMinDocFreq;
  std::string data_dir;
  std::string embeddings;
  std::string checkpoint;
  std::string output_dir;
  SkipGramConfig w2v;  // dim always follows model.embed_dim
  bool w2v_all_splits = false;

  // Validates everything except num_labels.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Every configurable key, in serialization order.
const std::vector<ConfigKey>& config_keys();

// ConfigError naming the key for unknown keys or unparsable values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat "key = value" lines; blank lines and lines starting with '#' or ';'
// are ignored. Keys may use '-' or '_'. `source` prefixes error messages.
KeyValues parse_key_values(const std::string& text, const std::string& source = "config");
KeyValues read_key_values(const std::filesystem::path& path);

// Layers in increasing precedence (e.g. {file, command line}). The preset,
// taken from the highest layer that names one, is expanded first; then every
// other key is applied layer by layer. If no layer sets `seed`, MRCNN_SEED is
// used when present. The result is validated.
RunConfig resolve_config(std::span<const KeyValues> layers);

// One "key = value" line per key; resolve_config(parse_key_values(s)) gives
// back an equal configuration.
std::string serialize(const RunConfig& config);

}  // namespace mrcnn
