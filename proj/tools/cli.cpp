#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mrcnn/batching.hpp"
#include "mrcnn/checkpoint.hpp"
#include "mrcnn/embeddings.hpp"
#include "mrcnn/errors.hpp"
#include "mrcnn/metrics.hpp"
#include "mrcnn/model.hpp"
#include "mrcnn/params.hpp"
#include "mrcnn/run_config.hpp"
#include "mrcnn/skipgram.hpp"
#include "mrcnn/synth.hpp"
#include "mrcnn/text.hpp"
#include "mrcnn/trainer.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string dashed(std::string name) {
  std::replace(name.begin(), name.end(), '_', '-');
  return name;
}

// Every config key as --key-name, plus --config FILE.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key = value config file (overridden by flags)");
    for (const auto& key : config_keys()) {
      CLI::Option* opt = app->add_option("--" + dashed(key.name), values[key.name], key.help);
      opt->group("Config keys");
      options.emplace_back(key.name, opt);
    }
  }

  RunConfig resolve() const {
    std::vector<KeyValues> layers;
    if (!file.empty()) layers.push_back(read_key_values(file));
    KeyValues flags;
    for (const auto& [name, opt] : options) {
      if (opt->count() > 0) flags.emplace_back(name, values.at(name));
    }
    layers.push_back(std::move(flags));
    RunConfig config = resolve_config(layers);
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
    return config;
  }
};

fs::path require_dir(const std::string& value, const char* key) {
  if (value.empty()) throw ConfigError(std::string(key) + ": required for this command");
  return value;
}

EncodedDataset load_split(const fs::path& data_dir, Split split, const Vocabulary& vocab) {
  const fs::path path = data_dir / (std::string(to_string(split)) + ".jsonl");
  if (!fs::exists(path)) throw DataError("missing split file " + path.string());
  return read_encoded(path, split, vocab);
}

Split split_from(const std::string& name) {
  for (Split s : {Split::train, Split::dev, Split::test}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("split: expected train, dev or test, got '" + name + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// ---- preprocess -------------------------------------------------------------

struct PreprocessArgs {
  ConfigFlags config;
  std::string train, dev, test, out;
};

int preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = a.config.resolve();
  const fs::path dir = require_dir(a.out.empty() ? cfg.data_dir : a.out, "out");
  fs::create_directories(dir);

  LoadStats stats;
  const auto train_docs = load_jsonl(a.train, cfg.max_len, &stats);
  err << "train: " << stats.documents << " documents (" << stats.skipped_empty
      << " empty skipped)\n";
  const Vocabulary vocab = build_vocab(train_docs, cfg.min_doc_freq);
  vocab.save(dir);

  json summary;
  summary["vocab_size"] = vocab.size();
  summary["num_labels"] = vocab.num_labels();
  summary["max_len"] = cfg.max_len;
  auto emit = [&](const std::vector<Document>& docs, Split split) {
    EncodeStats es;
    const auto data = encode_all(docs, vocab, split, &es);
    write_encoded(data, dir / (std::string(to_string(split)) + ".jsonl"));
    summary[std::string(to_string(split))] = {{"documents", data.size()},
                                              {"unknown_tokens", es.unknown_tokens},
                                              {"dropped_labels", es.dropped_labels}};
  };
  emit(train_docs, Split::train);
  if (!a.dev.empty()) emit(load_jsonl(a.dev, cfg.max_len), Split::dev);
  if (!a.test.empty()) emit(load_jsonl(a.test, cfg.max_len), Split::test);
  out << summary.dump(2) << "\n";
  return kOk;
}

// ---- pretrain-embeddings ----------------------------------------------------

struct PretrainArgs {
  ConfigFlags config;
  std::string out;
};

int pretrain(const PretrainArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = a.config.resolve();
  const fs::path dir = require_dir(cfg.data_dir, "data_dir");
  const Vocabulary vocab = Vocabulary::load(dir);
  std::vector<std::vector<TokenId>> corpus;
  std::vector<Split> splits{Split::train};
  if (cfg.w2v_all_splits) splits = {Split::train, Split::dev, Split::test};
  for (Split s : splits) {
    const fs::path p = dir / (std::string(to_string(s)) + ".jsonl");
    if (s != Split::train && !fs::exists(p)) continue;
    for (auto& ex : load_split(dir, s, vocab).examples) corpus.push_back(std::move(ex.tokens));
  }
  SkipGramConfig sg = cfg.w2v;
  sg.dim = cfg.model.embed_dim;
  const auto t0 = Clock::now();
  const Matrix vectors = pretrain_skipgram(corpus, vocab.size(), sg);
  const fs::path path = a.out.empty() ? dir / "embeddings.txt" : fs::path(a.out);
  write_text_embeddings(path, vectors, vocab);
  err << "pretrained " << vocab.size() - 2 << " vectors of dim " << sg.dim << " on "
      << corpus.size() << " documents in " << since(t0) << " s\n";
  out << path.string() << "\n";
  return kOk;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  ConfigFlags config;
  bool quiet = false;
};

int train_cmd(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = a.config.resolve();
  const fs::path data = require_dir(cfg.data_dir, "data_dir");
  const fs::path run_dir = require_dir(cfg.output_dir, "output_dir");
  const Vocabulary vocab = Vocabulary::load(data);
  const EncodedDataset train_set = load_split(data, Split::train, vocab);
  const EncodedDataset dev_set = load_split(data, Split::dev, vocab);
  cfg.model.num_labels = static_cast<int>(vocab.num_labels());
  cfg.model.validate();

  EmbeddingMatrix emb =
      cfg.embeddings.empty()
          ? random_embeddings(vocab.size(), cfg.model.embed_dim, cfg.train.seed)
          : load_text_embeddings(cfg.embeddings, vocab, cfg.model.embed_dim, cfg.train.seed);
  if (!a.quiet && emb.source == EmbeddingSource::pretrained) {
    err << "embedding coverage " << emb.coverage_report() << "\n";
  }
  ModelParams params = init_params(cfg.model, emb, cfg.train.seed);
  const ParamBreakdown pc = param_count(cfg.model, vocab.size());
  if (!a.quiet) {
    err << "parameters: " << pc.total() << " (embedding " << pc.embedding << ")\n";
  }

  fs::create_directories(run_dir);
  write_text(run_dir / "run_config.ini", serialize(cfg));
  std::ofstream log(run_dir / "train_log.jsonl", std::ios::binary);
  if (!log) throw DataError("cannot write " + (run_dir / "train_log.jsonl").string());

  TrainResult result =
      train(std::move(params), cfg.model, cfg.train, train_set, dev_set, [&](const EpochRecord& r) {
        log << r.to_json() << "\n";
        log.flush();
        if (!a.quiet) {
          err << "epoch " << r.epoch << " loss " << r.train_loss << " dev micro_f1 "
              << r.dev.micro_f1 << " (" << r.seconds << " s, " << r.train_examples_per_sec
              << " ex/s)\n";
        }
      });
  save_checkpoint(run_dir / "checkpoint.bin", result.best_params, cfg.model, vocab);

  json summary;
  summary["best_epoch"] = result.best_epoch;
  summary["early_stop_metric"] = std::string(to_string(result.metric));
  summary["best_dev_metric"] = result.best_metric;
  summary["epochs_run"] = result.log.size();
  summary["checkpoint"] = (run_dir / "checkpoint.bin").string();
  if (fs::exists(data / "test.jsonl")) {
    const EncodedDataset test_set = load_split(data, Split::test, vocab);
    const Matrix scores = predict(result.best_params, cfg.model, test_set, cfg.train.batch_size);
    const MetricsReport report = compute_metrics(scores, target_matrix(test_set), cfg.train.eval);
    write_text(run_dir / "test_metrics.json", to_json(report, 2) + "\n");
    summary["test_metrics"] = json::parse(to_json(report));
  }
  out << summary.dump(2) << "\n";
  return kOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  ConfigFlags config;
  std::string split = "test";
  std::string out;
};

int evaluate_cmd(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = a.config.resolve();
  const fs::path data = require_dir(cfg.data_dir, "data_dir");
  const Vocabulary vocab = Vocabulary::load(data);
  const Checkpoint ck = load_checkpoint(require_dir(cfg.checkpoint, "checkpoint"), vocab);
  const EncodedDataset set = load_split(data, split_from(a.split), vocab);
  const auto t0 = Clock::now();
  const Matrix scores = predict(ck.params, ck.config, set, cfg.train.batch_size);
  const double secs = since(t0);
  const MetricsReport report = compute_metrics(scores, target_matrix(set), cfg.train.eval);
  const std::string text = to_json(report, 2) + "\n";
  if (!a.out.empty()) write_text(a.out, text);
  out << text;
  err << set.size() << " documents in " << secs << " s ("
      << (secs > 0 ? static_cast<double>(set.size()) / secs : 0.0) << " ex/s)\n";
  return kOk;
}

// ---- predict ----------------------------------------------------------------

struct PredictArgs {
  ConfigFlags config;
  std::string split;
  std::string input;
  std::string out;
  bool explain = false;
  std::size_t explain_top = 5;
  std::size_t top_k = 5;
};

int predict_cmd(const PredictArgs& a, std::ostream& out, std::ostream&) {
  const RunConfig cfg = a.config.resolve();
  const fs::path data = require_dir(cfg.data_dir, "data_dir");
  const Vocabulary vocab = Vocabulary::load(data);
  const Checkpoint ck = load_checkpoint(require_dir(cfg.checkpoint, "checkpoint"), vocab);

  EncodedDataset set;
  if (!a.input.empty() == !a.split.empty()) {
    throw ConfigError("predict: give exactly one of --input or --split");
  }
  if (!a.input.empty()) {
    set.split = Split::test;
    set.num_labels = vocab.num_labels();
    for (const auto& doc : load_jsonl(a.input, cfg.max_len)) {
      set.examples.push_back(encode(doc, vocab, Split::test));
    }
  } else {
    set = load_split(data, split_from(a.split), vocab);
  }

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw DataError("cannot write " + a.out);
  }
  std::ostream& sink = a.out.empty() ? out : file;
  const double threshold = cfg.train.eval.threshold;
  const std::size_t l = vocab.num_labels();
  for (const auto& ex : set.examples) {
    const ForwardTrace tr = forward(ex.tokens, ck.params, ck.config);
    std::vector<std::size_t> order(l);
    for (std::size_t j = 0; j < l; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return tr.probabilities[x] > tr.probabilities[y];
    });

    json rec;
    rec["id"] = ex.id;
    json predicted = json::array();
    for (std::size_t j = 0; j < l; ++j) {
      if (tr.probabilities[j] >= threshold) predicted.push_back(vocab.label(static_cast<int>(j)));
    }
    rec["labels"] = predicted;
    json top = json::array();
    for (std::size_t r = 0; r < std::min(a.top_k, l); ++r) {
      top.push_back({{"label", vocab.label(static_cast<int>(order[r]))},
                     {"probability", tr.probabilities[order[r]]}});
    }
    rec["top"] = top;
    if (a.explain) {
      json explain = json::array();
      for (std::size_t j : order) {
        if (tr.probabilities[j] < threshold) break;
        json positions = json::array();
        for (std::size_t p : top_attention_positions(tr, j, a.explain_top)) {
          positions.push_back({{"position", p},
                               {"token", vocab.token(ex.tokens[p])},
                               {"weight", tr.attention.weights(p, j)}});
        }
        explain.push_back({{"label", vocab.label(static_cast<int>(j))},
                           {"probability", tr.probabilities[j]},
                           {"positions", positions}});
      }
      rec["explain"] = explain;
    }
    sink << rec.dump() << "\n";
  }
  return kOk;
}

// ---- synth-gen --------------------------------------------------------------

struct SynthArgs {
  SynthConfig config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int synth_cmd(const SynthArgs& a, std::ostream& out, std::ostream&) {
  SynthConfig sc = a.config;
  if (a.seed) {
    sc.seed = *a.seed;
  } else if (const char* env = std::getenv("MRCNN_SEED"); env && *env) {
    try {
      sc.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("seed: MRCNN_SEED='") + env + "' is not an integer");
    }
  }
  const fs::path dir = require_dir(a.out, "out");
  const SynthCorpus corpus = synth_corpus(sc);
  fs::create_directories(dir);
  write_synth_jsonl(corpus.train, dir / "train.jsonl");
  write_synth_jsonl(corpus.dev, dir / "dev.jsonl");
  write_synth_jsonl(corpus.test, dir / "test.jsonl");
  json patterns = json::object();
  for (std::size_t j = 0; j < corpus.patterns.size(); ++j) {
    patterns[corpus.label_names[j]] = corpus.patterns[j];
  }
  write_text(dir / "patterns.json", patterns.dump(2) + "\n");
  out << json({{"train", corpus.train.size()},
               {"dev", corpus.dev.size()},
               {"test", corpus.test.size()},
               {"labels", corpus.label_names.size()}})
             .dump(2)
      << "\n";
  return kOk;
}

// ---- show-config ------------------------------------------------------------

struct ShowConfigArgs {
  ConfigFlags config;
};

int show_config(const ShowConfigArgs& a, std::ostream& out) {
  out << serialize(a.config.resolve());
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-filter residual CNN with per-label attention for multi-label text"};
  app.name("mrcnn");
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "tokenize raw JSONL splits, build vocabulary, encode");
  pre_cmd->add_option("--train", pre.train, "raw training JSONL")->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("--dev", pre.dev, "raw dev JSONL")->check(CLI::ExistingFile);
  pre_cmd->add_option("--test", pre.test, "raw test JSONL")->check(CLI::ExistingFile);
  pre_cmd->add_option("--out", pre.out, "output directory (default: data_dir)");
  pre.config.attach(pre_cmd);

  PretrainArgs pt;
  auto* pt_cmd = app.add_subcommand("pretrain-embeddings", "skip-gram word vectors for the vocabulary");
  pt_cmd->add_option("--out", pt.out, "output file (default: data_dir/embeddings.txt)");
  pt.config.attach(pt_cmd);

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "train with early stopping on the dev split");
  tr_cmd->add_flag("--quiet", tr.quiet, "no per-epoch progress on stderr");
  tr.config.attach(tr_cmd);

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "metrics of a checkpoint on an encoded split");
  ev_cmd->add_option("--split", ev.split, "train, dev or test")->capture_default_str();
  ev_cmd->add_option("--out", ev.out, "also write the JSON report here");
  ev.config.attach(ev_cmd);

  PredictArgs pr;
  auto* pr_cmd = app.add_subcommand("predict", "per-document label predictions as JSONL");
  pr_cmd->add_option("--split", pr.split, "encoded split in data_dir to predict");
  pr_cmd->add_option("--input", pr.input, "raw JSONL documents to predict")->check(CLI::ExistingFile);
  pr_cmd->add_option("--out", pr.out, "output file (default: stdout)");
  pr_cmd->add_flag("--explain", pr.explain, "top attention positions for every predicted label");
  pr_cmd->add_option("--explain-top", pr.explain_top, "positions per label with --explain")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  pr_cmd->add_option("--top-k", pr.top_k, "highest-scoring labels to list")->capture_default_str();
  pr.config.attach(pr_cmd);

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth-gen", "planted-pattern synthetic corpus");
  sy_cmd->add_option("--out", sy.out, "output directory")->required();
  sy_cmd->add_option("--num-docs", sy.config.num_docs)->capture_default_str();
  sy_cmd->add_option("--num-labels", sy.config.num_labels)->capture_default_str();
  sy_cmd->add_option("--pattern-lengths", sy.config.pattern_lengths, "cycled over labels")
      ->delimiter(',')
      ->capture_default_str();
  sy_cmd->add_option("--vocab-size", sy.config.vocab_size)->capture_default_str();
  sy_cmd->add_option("--doc-length", sy.config.doc_length)->capture_default_str();
  sy_cmd->add_option("--noise-rate", sy.config.noise_rate, "decoy probability per label and document")
      ->capture_default_str();
  sy_cmd->add_option("--label-rate", sy.config.label_rate, "pattern probability per label and document")
      ->capture_default_str();
  sy_cmd->add_option("--dev-fraction", sy.config.dev_fraction)->capture_default_str();
  sy_cmd->add_option("--test-fraction", sy.config.test_fraction)->capture_default_str();
  sy_cmd->add_option("--seed", sy.seed, "default: MRCNN_SEED, else 1");

  ShowConfigArgs sc;
  auto* sc_cmd = app.add_subcommand("show-config", "print the resolved configuration");
  sc.config.attach(sc_cmd);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      // Prints help to `out`, errors to `err`.
      return app.exit(e, out, err) == 0 ? kOk : kConfigError;
    }
    if (*pre_cmd) return preprocess(pre, out, err);
    if (*pt_cmd) return pretrain(pt, out, err);
    if (*tr_cmd) return train_cmd(tr, out, err);
    if (*ev_cmd) return evaluate_cmd(ev, out, err);
    if (*pr_cmd) return predict_cmd(pr, out, err);
    if (*sy_cmd) return synth_cmd(sy, out, err);
    if (*sc_cmd) return show_config(sc, out);
    return kFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace mrcnn::cli
