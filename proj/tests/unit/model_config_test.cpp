#include <gtest/gtest.h>

#include "mrcnn/errors.hpp"
#include "mrcnn/model_config.hpp"

using mrcnn::ModelConfig;

TEST(Presets, ExpandToTableConfigurations) {
  const ModelConfig mr = mrcnn::apply_preset("multirescnn");
  EXPECT_EQ(mr.kernel_sizes, (std::vector<int>{3, 5, 9, 15, 19, 25}));
  EXPECT_EQ(mr.residual_blocks(), 1u);
  EXPECT_EQ(mr.channel_schedule, (std::vector<int>{100, 50}));
  EXPECT_EQ(mr.embed_dim, 100);
  EXPECT_DOUBLE_EQ(mr.dropout_rate, 0.2);

  const ModelConfig cnn = mrcnn::apply_preset("cnn");
  EXPECT_EQ(cnn.kernel_sizes, std::vector<int>{9});
  EXPECT_EQ(cnn.residual_blocks(), 0u);

  EXPECT_EQ(mrcnn::apply_preset("multicnn-3").kernel_sizes, (std::vector<int>{5, 9, 15}));
  EXPECT_EQ(mrcnn::apply_preset("multicnn-5").kernel_sizes, (std::vector<int>{3, 5, 9, 15, 19}));
  EXPECT_EQ(mrcnn::apply_preset("rescnn-2").channel_schedule, (std::vector<int>{100, 100, 50}));
  EXPECT_EQ(mrcnn::apply_preset("rescnn-3").channel_schedule, (std::vector<int>{100, 150, 100, 50}));
  EXPECT_EQ(mrcnn::apply_preset("rescnn"), mrcnn::apply_preset("rescnn-1"));
  EXPECT_THROW(mrcnn::apply_preset("bogus"), mrcnn::ConfigError);
}

TEST(Presets, KeepLabelCount) {
  ModelConfig base;
  base.num_labels = 50;
  EXPECT_EQ(mrcnn::apply_preset("cnn", base).num_labels, 50);
}

TEST(ModelConfig, FeatureWidth) {
  ModelConfig c = mrcnn::apply_preset("multirescnn");
  EXPECT_EQ(c.feature_width(), 300u);
  c = mrcnn::apply_preset("multicnn");
  EXPECT_EQ(c.feature_width(), 600u);
}

TEST(ModelConfig, ValidationNamesTheField) {
  auto message = [](ModelConfig c) {
    try {
      c.validate();
    } catch (const mrcnn::ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  ModelConfig c;
  c.num_labels = 4;
  EXPECT_EQ(message(c), "");
  ModelConfig even = c;
  even.kernel_sizes = {3, 4};
  EXPECT_EQ(message(even).rfind("kernel_sizes", 0), 0u);
  ModelConfig dup = c;
  dup.kernel_sizes = {3, 3};
  EXPECT_EQ(message(dup).rfind("kernel_sizes", 0), 0u);
  ModelConfig sched = c;
  sched.channel_schedule = {50, 50};
  EXPECT_EQ(message(sched).rfind("channel_schedule", 0), 0u);
  ModelConfig drop = c;
  drop.dropout_rate = 1.0;
  EXPECT_EQ(message(drop).rfind("dropout", 0), 0u);
}

TEST(OutputMode, Names) {
  EXPECT_EQ(mrcnn::output_mode_from_string("per_label"), mrcnn::OutputMode::per_label);
  EXPECT_EQ(mrcnn::output_mode_from_string("literal_row_sum"), mrcnn::OutputMode::literal_row_sum);
  EXPECT_THROW(mrcnn::output_mode_from_string("sum"), mrcnn::ConfigError);
}
