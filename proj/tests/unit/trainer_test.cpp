#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <json.hpp>

#include "mrcnn/errors.hpp"
#include "mrcnn/model.hpp"
#include "mrcnn/trainer.hpp"
#include "oracles.hpp"

namespace {

// Label j is present exactly when token 2 + j occurs.
mrcnn::EncodedDataset keyword_dataset(std::uint64_t seed, std::size_t n, std::size_t l) {
  mrcnn::Rng rng(seed);
  mrcnn::EncodedDataset d;
  d.num_labels = l;
  for (std::size_t i = 0; i < n; ++i) {
    mrcnn::EncodedExample e;
    e.id = std::to_string(i);
    for (std::size_t t = 0, len = 6 + rng.below(10); t < len; ++t)
      e.tokens.push_back(static_cast<mrcnn::TokenId>(2 + l + rng.below(20)));
    e.labels.assign(l, 0);
    for (std::size_t j = 0; j < l; ++j) {
      if (rng.bernoulli(0.3)) {
        e.tokens[rng.below(e.tokens.size())] = static_cast<mrcnn::TokenId>(2 + j);
      }
    }
    for (std::size_t j = 0; j < l; ++j)
      e.labels[j] = std::find(e.tokens.begin(), e.tokens.end(), static_cast<mrcnn::TokenId>(2 + j)) !=
                    e.tokens.end();
    d.examples.push_back(std::move(e));
  }
  return d;
}

constexpr std::size_t kVocab = 30;

mrcnn::ModelParams start(const mrcnn::ModelConfig& c, std::uint64_t seed) {
  mrcnn::Rng rng(seed);
  auto p = mrcnn::ModelParams::zeros(c, kVocab);
  oracle::randomize(p, rng, 0.3);
  return p;
}

mrcnn::TrainConfig quick() {
  mrcnn::TrainConfig t;
  t.lr = 1e-2;
  t.batch_size = 8;
  t.max_epochs = 5;
  t.early_stop_metric = mrcnn::StopMetric::micro_f1;
  return t;
}

}  // namespace

TEST(Trainer, NoImprovementStopsAfterPatience) {
  const auto c = oracle::micro_config("cnn", 3);
  const auto data = keyword_dataset(1, 20, 3);
  for (int patience : {1, 3}) {
    auto t = quick();
    t.lr = 1e-15;
    t.patience = patience;
    t.max_epochs = 20;
    const auto r = mrcnn::train(start(c, 1), c, t, data, data);
    EXPECT_EQ(r.log.size(), static_cast<std::size_t>(patience + 1));
    EXPECT_EQ(r.best_epoch, 1);
  }
}

TEST(Trainer, MaxEpochsAndCallback) {
  const auto c = oracle::micro_config("multirescnn", 3);
  const auto data = keyword_dataset(2, 20, 3);
  auto t = quick();
  t.max_epochs = 3;
  t.patience = 100;
  std::vector<int> seen;
  const auto r = mrcnn::train(start(c, 2), c, t, data, data,
                              [&](const mrcnn::EpochRecord& e) { seen.push_back(e.epoch); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(r.log.size(), 3u);
  EXPECT_EQ(r.metric, mrcnn::StopMetric::micro_f1);
  EXPECT_DOUBLE_EQ(r.best_metric, r.log[static_cast<std::size_t>(r.best_epoch - 1)].dev.micro_f1);
}

TEST(Trainer, LossFallsOnLearnableData) {
  auto c = oracle::micro_config("multirescnn", 4);
  c.embed_dim = 8;
  const auto data = keyword_dataset(3, 50, 4);
  auto t = quick();
  t.max_epochs = 80;
  t.patience = 1000;
  const auto r = mrcnn::train(start(c, 3), c, t, data, data);
  EXPECT_LE(r.log.back().train_loss, 0.1 * r.log.front().train_loss)
      << r.log.front().train_loss << " -> " << r.log.back().train_loss;
}

TEST(Trainer, RunsAreReproducible) {
  auto c = oracle::micro_config("multicnn", 3);
  c.dropout_rate = 0.3;
  const auto data = keyword_dataset(4, 30, 3);
  const auto a = mrcnn::train(start(c, 4), c, quick(), data, data);
  const auto b = mrcnn::train(start(c, 4), c, quick(), data, data);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);
    EXPECT_EQ(a.log[i].dev, b.log[i].dev);
  }
  const auto pa = a.best_params.tensors(), pb = b.best_params.tensors();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(*pa[i], *pb[i]);
}

TEST(Trainer, PadRowStaysZeroAndFreezeKeepsEmbeddings) {
  const auto c = oracle::micro_config("rescnn", 3);
  const auto data = keyword_dataset(5, 20, 3);
  const auto init = start(c, 5);
  const auto r = mrcnn::train(init, c, quick(), data, data);
  for (double v : r.best_params.embedding.row(0)) EXPECT_EQ(v, 0.0);
  EXPECT_NE(r.best_params.embedding, init.embedding);
  auto t = quick();
  t.freeze_embeddings = true;
  const auto f = mrcnn::train(init, c, t, data, data);
  EXPECT_EQ(f.best_params.embedding, init.embedding);
  EXPECT_NE(f.best_params.attention, init.attention);
}

TEST(Trainer, NonFiniteLossAborts) {
  const auto c = oracle::micro_config("cnn", 3);
  const auto data = keyword_dataset(6, 10, 3);
  auto p = start(c, 6);
  p.output(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(mrcnn::train(p, c, quick(), data, data), mrcnn::NumericError);
}

TEST(Trainer, ConfigValidation) {
  const auto c = oracle::micro_config("cnn", 3);
  const auto data = keyword_dataset(7, 10, 3);
  auto t = quick();
  t.lr = -1.0;
  EXPECT_THROW(t.validate(), mrcnn::ConfigError);
  t = quick();
  t.batch_size = 0;
  EXPECT_THROW(mrcnn::train(start(c, 7), c, t, data, data), mrcnn::ConfigError);
  t = quick();
  t.max_epochs = 0;
  EXPECT_THROW(t.validate(), mrcnn::ConfigError);
  EXPECT_NO_THROW(quick().validate());
}

TEST(StopMetric, NamesAndAutomaticChoice) {
  using mrcnn::StopMetric;
  for (auto m : {StopMetric::automatic, StopMetric::p_at_8, StopMetric::p_at_5, StopMetric::micro_f1,
                 StopMetric::macro_f1})
    EXPECT_EQ(mrcnn::stop_metric_from_string(mrcnn::to_string(m)), m);
  EXPECT_THROW(mrcnn::stop_metric_from_string("accuracy"), mrcnn::ConfigError);
  EXPECT_EQ(mrcnn::resolve_stop_metric(StopMetric::automatic, 51), StopMetric::p_at_8);
  EXPECT_EQ(mrcnn::resolve_stop_metric(StopMetric::automatic, 50), StopMetric::p_at_5);
  EXPECT_EQ(mrcnn::resolve_stop_metric(StopMetric::macro_f1, 50), StopMetric::macro_f1);
  mrcnn::MetricsReport r;
  r.micro_f1 = 0.25;
  r.precision_at[5] = 0.5;
  EXPECT_EQ(mrcnn::metric_value(r, StopMetric::micro_f1), 0.25);
  EXPECT_EQ(mrcnn::metric_value(r, StopMetric::p_at_5), 0.5);
}

TEST(EpochRecord, JsonFields) {
  mrcnn::EpochRecord e;
  e.epoch = 4;
  e.train_loss = 1.5;
  e.dev.micro_f1 = 0.5;
  const auto j = nlohmann::json::parse(e.to_json());
  EXPECT_EQ(j.at("epoch").get<int>(), 4);
  EXPECT_EQ(j.at("train_loss").get<double>(), 1.5);
  EXPECT_EQ(j.at("dev_metrics").at("micro_f1").get<double>(), 0.5);
  EXPECT_TRUE(j.contains("seconds"));
}
