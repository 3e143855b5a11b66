#include "mrcnn/params.hpp"

#include <cmath>

#include "mrcnn/errors.hpp"
#include "mrcnn/rng.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {
namespace {

ConvParams make_conv(int kernel, int in, int out, bool bias) {
  ConvParams c;
  c.spec = ConvSpec{kernel, in, out, bias, 1};
  c.weight = Matrix(c.spec.weight_rows(), static_cast<std::size_t>(out));
  if (bias) c.bias = Matrix(1, static_cast<std::size_t>(out));
  return c;
}

template <typename Params, typename Fn>
void visit(Params& p, Fn&& fn) {
  if (!p.embedding.empty()) fn(std::string("embedding"), p.embedding);
  for (std::size_t f = 0; f < p.filters.size(); ++f) {
    auto& filter = p.filters[f];
    const std::string prefix = "filter" + std::to_string(f);
    fn(prefix + ".conv.weight", filter.conv.weight);
    if (filter.conv.spec.has_bias) fn(prefix + ".conv.bias", filter.conv.bias);
    for (std::size_t b = 0; b < filter.blocks.size(); ++b) {
      auto& block = filter.blocks[b];
      const std::string bp = prefix + ".block" + std::to_string(b);
      for (auto [name, conv] : {std::pair{".first", &block.first}, std::pair{".second", &block.second},
                                std::pair{".shortcut", &block.shortcut}}) {
        fn(bp + name + ".weight", conv->weight);
        if (conv->spec.has_bias) fn(bp + name + ".bias", conv->bias);
      }
    }
  }
  fn(std::string("attention"), p.attention);
  fn(std::string("output"), p.output);
  if (!p.output_bias.empty()) fn(std::string("output_bias"), p.output_bias);
}

}  // namespace

ModelParams ModelParams::zeros(const ModelConfig& config, std::size_t vocab_size) {
  config.validate();
  ModelParams p;
  if (vocab_size > 0) p.embedding = Matrix(vocab_size, static_cast<std::size_t>(config.embed_dim));
  const bool bias = config.use_bias;
  for (int k : config.kernel_sizes) {
    FilterParams f;
    f.conv = make_conv(k, config.embed_dim, config.filter_channels, bias);
    for (std::size_t i = 1; i < config.channel_schedule.size(); ++i) {
      const int in = config.channel_schedule[i - 1];
      const int out = config.channel_schedule[i];
      f.blocks.push_back({make_conv(k, in, out, bias), make_conv(k, out, out, bias),
                          make_conv(1, in, out, bias)});
    }
    p.filters.push_back(std::move(f));
  }
  const auto width = config.feature_width();
  const auto labels = static_cast<std::size_t>(config.num_labels);
  p.attention = Matrix(width, labels);
  p.output = Matrix(width, labels);
  if (bias) p.output_bias = Matrix(1, labels);
  return p;
}

void ModelParams::for_each(const std::function<void(const std::string&, Matrix&)>& fn) {
  visit(*this, fn);
}

void ModelParams::for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const {
  visit(*this, fn);
}

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> out;
  for_each([&out](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  std::vector<const Matrix*> out;
  for_each([&out](const std::string&, const Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<std::string> ModelParams::names() const {
  std::vector<std::string> out;
  for_each([&out](const std::string& name, const Matrix&) { out.push_back(name); });
  return out;
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for_each([&n](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

void ModelParams::set_zero() {
  for_each([](const std::string&, Matrix& m) { m.fill(0.0); });
}

ParamBreakdown param_count(const ModelConfig& config, std::size_t vocab_size) {
  config.validate();
  ParamBreakdown b;
  const auto de = static_cast<std::size_t>(config.embed_dim);
  const auto df = static_cast<std::size_t>(config.filter_channels);
  const std::size_t bias = config.use_bias ? 1 : 0;
  b.embedding = vocab_size * de;
  for (int kk : config.kernel_sizes) {
    const auto k = static_cast<std::size_t>(kk);
    b.filters += k * de * df + bias * df;
    for (std::size_t i = 1; i < config.channel_schedule.size(); ++i) {
      const auto in = static_cast<std::size_t>(config.channel_schedule[i - 1]);
      const auto out = static_cast<std::size_t>(config.channel_schedule[i]);
      b.residual += k * in * out + k * out * out + in * out + 3 * bias * out;
    }
  }
  const auto width = config.feature_width();
  const auto l = static_cast<std::size_t>(config.num_labels);
  b.attention = width * l;
  b.output = width * l + bias * l;
  return b;
}

ModelParams init_params(const ModelConfig& config, const EmbeddingMatrix& embeddings,
                        std::uint64_t seed) {
  if (embeddings.rows.cols() != static_cast<std::size_t>(config.embed_dim)) {
    throw ConfigError("embed_dim: embeddings have " + std::to_string(embeddings.rows.cols()) +
                      " columns, config expects " + std::to_string(config.embed_dim));
  }
  if (embeddings.rows.rows() < 2) throw ConfigError("embeddings: vocabulary too small");
  ModelParams p = ModelParams::zeros(config, embeddings.rows.rows());
  p.embedding = embeddings.rows;
  for (auto& v : p.embedding.row(Vocabulary::kPad)) v = 0.0;

  Rng rng({seed, 0x1417ULL});
  p.for_each([&rng](const std::string& name, Matrix& m) {
    if (name == "embedding" || name.ends_with("bias")) return;
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (auto& v : m.values()) v = rng.uniform(-limit, limit);
  });
  return p;
}

}  // namespace mrcnn
