#include "mrcnn/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mrcnn/errors.hpp"

namespace mrcnn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string canonical_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw ConfigError(key + ": cannot parse '" + value + "' as " + want);
}

template <class T>
T parse_int(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int<T>(key, trim(item)));
  if (out.empty()) bad_value(key, value, "a comma-separated list");
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest form that reads back identically.
  for (int p = 1; p < 17; ++p) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", p, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::vector<ConfigKey> make_keys() {
  std::vector<ConfigKey> k;
  auto add = [&](std::string name, std::string help, auto set, auto get) {
    k.push_back({std::move(name), std::move(help), set, get});
  };
  using C = RunConfig;
  using S = const std::string&;

  std::string preset_help = "architecture preset (";
  for (const auto& p : preset_names()) preset_help += (preset_help.back() == '(' ? "" : ", ") + p;
  preset_help += "); expanded before all other keys";
  add("preset", preset_help,
      [](C& c, S v) {
        if (!v.empty()) c.model = apply_preset(v, c.model);
        c.preset = v;
      },
      [](const C& c) { return c.preset; });

  add("kernel_sizes", "comma-separated odd kernel sizes, one parallel filter each",
      [](C& c, S v) { c.model.kernel_sizes = parse_list<int>("kernel_sizes", v); },
      [](const C& c) { return join(c.model.kernel_sizes); });
  add("filter_channels", "output channels d_f of each first-layer filter",
      [](C& c, S v) { c.model.filter_channels = parse_int<int>("filter_channels", v); },
      [](const C& c) { return std::to_string(c.model.filter_channels); });
  add("channel_schedule",
      "residual channel widths d^0..d^p, d^0 = filter_channels; one entry means no residual blocks",
      [](C& c, S v) { c.model.channel_schedule = parse_list<int>("channel_schedule", v); },
      [](const C& c) { return join(c.model.channel_schedule); });
  add("embed_dim", "word embedding size d_e",
      [](C& c, S v) { c.model.embed_dim = parse_int<int>("embed_dim", v); },
      [](const C& c) { return std::to_string(c.model.embed_dim); });
  add("dropout", "dropout rate on the embedded input",
      [](C& c, S v) { c.model.dropout_rate = parse_double("dropout", v); },
      [](const C& c) { return fmt_double(c.model.dropout_rate); });
  add("output_mode", "per_label or literal_row_sum",
      [](C& c, S v) { c.model.output_mode = output_mode_from_string(v); },
      [](const C& c) { return std::string(to_string(c.model.output_mode)); });
  add("use_bias", "bias terms in convolutions and output layer",
      [](C& c, S v) { c.model.use_bias = parse_bool("use_bias", v); },
      [](const C& c) { return fmt_bool(c.model.use_bias); });
  add("mask_pad", "keep batch padding out of convolutions and attention",
      [](C& c, S v) { c.model.mask_padding = parse_bool("mask_pad", v); },
      [](const C& c) { return fmt_bool(c.model.mask_padding); });

  add("lr", "Adam learning rate",
      [](C& c, S v) { c.train.lr = parse_double("lr", v); },
      [](const C& c) { return fmt_double(c.train.lr); });
  add("batch_size", "documents per mini-batch",
      [](C& c, S v) { c.train.batch_size = parse_int<std::size_t>("batch_size", v); },
      [](const C& c) { return std::to_string(c.train.batch_size); });
  add("patience", "epochs without dev improvement before stopping",
      [](C& c, S v) { c.train.patience = parse_int<int>("patience", v); },
      [](const C& c) { return std::to_string(c.train.patience); });
  add("max_epochs", "upper bound on training epochs",
      [](C& c, S v) { c.train.max_epochs = parse_int<int>("max_epochs", v); },
      [](const C& c) { return std::to_string(c.train.max_epochs); });
  add("early_stop_metric", "auto, p@8, p@5, micro_f1 or macro_f1 (auto: p@8 above 50 labels, else p@5)",
      [](C& c, S v) { c.train.early_stop_metric = stop_metric_from_string(v); },
      [](const C& c) { return std::string(to_string(c.train.early_stop_metric)); });
  add("freeze_embeddings", "keep the embedding matrix fixed during training",
      [](C& c, S v) { c.train.freeze_embeddings = parse_bool("freeze_embeddings", v); },
      [](const C& c) { return fmt_bool(c.train.freeze_embeddings); });
  add("seed", "global seed (fallback: MRCNN_SEED environment variable)",
      [](C& c, S v) {
        c.train.seed = parse_int<std::uint64_t>("seed", v);
        c.w2v.seed = c.train.seed;
      },
      [](const C& c) { return std::to_string(c.train.seed); });
  add("threads", "worker threads for evaluation and batch gradients (0 = default)",
      [](C& c, S v) { c.threads = parse_int<int>("threads", v); },
      [](const C& c) { return std::to_string(c.threads); });
  add("threshold", "probability at or above which a label is predicted",
      [](C& c, S v) { c.train.eval.threshold = parse_double("threshold", v); },
      [](const C& c) { return fmt_double(c.train.eval.threshold); });
  add("eval_ks", "K values for precision@K",
      [](C& c, S v) { c.train.eval.ks = parse_list<std::size_t>("eval_ks", v); },
      [](const C& c) { return join(c.train.eval.ks); });
  add("mean_f1", "also report the mean of per-label F1 scores",
      [](C& c, S v) { c.train.eval.mean_label_f1 = parse_bool("mean_f1", v); },
      [](const C& c) { return fmt_bool(c.train.eval.mean_label_f1); });

  add("max_len", "truncate documents to this many tokens",
      [](C& c, S v) { c.max_len = parse_int<std::size_t>("max_len", v); },
      [](const C& c) { return std::to_string(c.max_len); });
  add("min_doc_freq", "minimum number of training documents a token must occur in",
      [](C& c, S v) { c.min_doc_freq = parse_int<int>("min_doc_freq", v); },
      [](const C& c) { return std::to_string(c.min_doc_freq); });
  add("data_dir", "directory with vocab.txt, labels.txt and encoded splits",
      [](C& c, S v) { c.data_dir = v; }, [](const C& c) { return c.data_dir; });
  add("embeddings", "pretrained embedding text file (empty: random init)",
      [](C& c, S v) { c.embeddings = v; }, [](const C& c) { return c.embeddings; });
  add("checkpoint", "checkpoint file to load",
      [](C& c, S v) { c.checkpoint = v; }, [](const C& c) { return c.checkpoint; });
  add("output_dir", "directory for run artifacts",
      [](C& c, S v) { c.output_dir = v; }, [](const C& c) { return c.output_dir; });

  add("w2v_window", "skip-gram context window",
      [](C& c, S v) { c.w2v.window = parse_int<int>("w2v_window", v); },
      [](const C& c) { return std::to_string(c.w2v.window); });
  add("w2v_negatives", "skip-gram negative samples per pair",
      [](C& c, S v) { c.w2v.negatives = parse_int<int>("w2v_negatives", v); },
      [](const C& c) { return std::to_string(c.w2v.negatives); });
  add("w2v_epochs", "skip-gram passes over the corpus",
      [](C& c, S v) { c.w2v.epochs = parse_int<int>("w2v_epochs", v); },
      [](const C& c) { return std::to_string(c.w2v.epochs); });
  add("w2v_lr", "skip-gram initial learning rate",
      [](C& c, S v) { c.w2v.lr = parse_double("w2v_lr", v); },
      [](const C& c) { return fmt_double(c.w2v.lr); });
  add("w2v_all_splits", "pretrain embeddings on train, dev and test text instead of train only",
      [](C& c, S v) { c.w2v_all_splits = parse_bool("w2v_all_splits", v); },
      [](const C& c) { return fmt_bool(c.w2v_all_splits); });
  return k;
}

const ConfigKey& find_key(const std::string& key) {
  const auto& keys = config_keys();
  const std::string name = canonical_key(key);
  const auto it = std::find_if(keys.begin(), keys.end(),
                               [&](const ConfigKey& k) { return k.name == name; });
  if (it == keys.end()) throw ConfigError(key + ": unknown config key");
  return *it;
}

}  // namespace

void RunConfig::validate() const {
  ModelConfig m = model;
  if (m.num_labels <= 0) m.num_labels = 1;
  m.validate();
  train.validate();
  if (threads < 0) throw ConfigError("threads: must be non-negative");
  if (max_len < 1) throw ConfigError("max_len: must be positive");
  if (min_doc_freq < 1) throw ConfigError("min_doc_freq: must be positive");
  if (w2v.window < 1) throw ConfigError("w2v_window: must be positive");
  if (w2v.negatives < 0) throw ConfigError("w2v_negatives: must be non-negative");
  if (w2v.epochs < 0) throw ConfigError("w2v_epochs: must be non-negative");
  if (!(w2v.lr > 0.0)) throw ConfigError("w2v_lr: must be positive");
  for (std::size_t k : train.eval.ks) {
    if (k == 0) throw ConfigError("eval_ks: K must be positive");
  }
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = make_keys();
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const ConfigKey& k = find_key(key);
  try {
    k.set(config, value);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(k.name + ":", 0) == 0) throw;
    throw ConfigError(k.name + ": " + msg);
  }
}

std::string get_config_value(const RunConfig& config, const std::string& key) {
  return find_key(key).get(config);
}

KeyValues parse_key_values(const std::string& text, const std::string& source) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = canonical_key(trim(t.substr(0, eq)));
    find_key(key);  // reject unknown keys early, with the key name
    out.emplace_back(std::move(key), trim(t.substr(eq + 1)));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path.string());
}

RunConfig resolve_config(std::span<const KeyValues> layers) {
  RunConfig config;
  const std::string* preset = nullptr;
  bool seed_set = false;
  for (const auto& layer : layers) {
    for (const auto& [key, value] : layer) {
      const std::string k = canonical_key(key);
      if (k == "preset") preset = &value;
      if (k == "seed") seed_set = true;
    }
  }
  if (!seed_set) {
    if (const char* env = std::getenv("MRCNN_SEED"); env && *env) {
      try {
        set_config_value(config, "seed", env);
      } catch (const ConfigError&) {
        throw ConfigError(std::string("seed: MRCNN_SEED='") + env + "' is not an integer");
      }
    }
  }
  if (preset) set_config_value(config, "preset", *preset);
  for (const auto& layer : layers) {
    for (const auto& [key, value] : layer) {
      if (canonical_key(key) != "preset") set_config_value(config, key, value);
    }
  }
  config.validate();
  return config;
}

std::string serialize(const RunConfig& config) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace mrcnn
