#include "mrcnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <vector>

#include "mrcnn/errors.hpp"

namespace mrcnn {
namespace {

using nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(const std::string& in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + static_cast<std::size_t>(i)])) << (8 * i);
  return v;
}

std::uint64_t fnv1a(const char* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

json config_json(const ModelConfig& c) {
  return {{"kernel_sizes", c.kernel_sizes},
          {"filter_channels", c.filter_channels},
          {"channel_schedule", c.channel_schedule},
          {"num_labels", c.num_labels},
          {"embed_dim", c.embed_dim},
          {"dropout", c.dropout_rate},
          {"output_mode", std::string(to_string(c.output_mode))},
          {"use_bias", c.use_bias},
          {"mask_pad", c.mask_padding}};
}

ModelConfig config_from(const json& j) {
  ModelConfig c;
  c.kernel_sizes = j.at("kernel_sizes").get<std::vector<int>>();
  c.filter_channels = j.at("filter_channels").get<int>();
  c.channel_schedule = j.at("channel_schedule").get<std::vector<int>>();
  c.num_labels = j.at("num_labels").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.dropout_rate = j.at("dropout").get<double>();
  c.output_mode = output_mode_from_string(j.at("output_mode").get<std::string>());
  c.use_bias = j.at("use_bias").get<bool>();
  c.mask_padding = j.at("mask_pad").get<bool>();
  c.validate();
  return c;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& config) { return config_json(config).dump(); }

ModelConfig model_config_from_json(const std::string& text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const ModelConfig& config, const Vocabulary& vocab) {
  if (params.embedding.rows() != vocab.size()) {
    throw ShapeError("save_checkpoint: embedding has " + std::to_string(params.embedding.rows()) +
                     " rows, vocabulary has " + std::to_string(vocab.size()));
  }
  json tensors = json::array();
  std::size_t float_count = 0;
  params.for_each([&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    float_count += m.size();
  });
  const json header = {{"format", "mrcnn-checkpoint"},
                       {"config", config_json(config)},
                       {"vocab_size", vocab.size()},
                       {"token_checksum", checksum_hex(vocab.token_checksum())},
                       {"label_checksum", checksum_hex(vocab.label_checksum())},
                       {"tensors", tensors},
                       {"float_count", float_count}};
  const std::string header_text = header.dump();

  std::string payload;
  payload.reserve(float_count * 4);
  params.for_each([&](const std::string&, const Matrix& m) {
    for (double v : m.values()) put_u32(payload, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  });

  std::string blob(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(blob, kCheckpointVersion);
  put_u64(blob, header_text.size());
  blob += header_text;
  blob += payload;
  put_u64(blob, fnv1a(payload.data(), payload.size()));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";

  if (blob.size() < 20 || std::memcmp(blob.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw DataError(where + "not a checkpoint (bad magic or truncated preamble)");
  }
  const auto version = static_cast<std::uint32_t>(get_le(blob, 8, 4));
  if (version != kCheckpointVersion) {
    throw DataError(where + "unsupported checkpoint version " + std::to_string(version) +
                    " (this build reads version " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t header_len = get_le(blob, 12, 8);
  if (header_len > blob.size() - 20) throw DataError(where + "truncated header");

  Checkpoint ck;
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  std::size_t float_count = 0;
  try {
    const json header = json::parse(blob.substr(20, header_len));
    ck.config = config_from(header.at("config"));
    ck.vocab_size = header.at("vocab_size").get<std::size_t>();
    ck.token_checksum = std::stoull(header.at("token_checksum").get<std::string>(), nullptr, 16);
    ck.label_checksum = std::stoull(header.at("label_checksum").get<std::string>(), nullptr, 16);
    float_count = header.at("float_count").get<std::size_t>();
    for (const auto& t : header.at("tensors"))
      shapes.emplace_back(t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>());
  } catch (const json::exception& e) {
    throw DataError(where + "malformed header: " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(where + "invalid config in header: " + e.what());
  }

  const std::size_t payload_offset = 20 + header_len;
  if (float_count > (blob.size() - payload_offset) / 4 ||
      blob.size() - payload_offset != float_count * 4 + 8) {
    throw DataError(where + "truncated or oversized payload");
  }
  const std::uint64_t stored = get_le(blob, payload_offset + float_count * 4, 8);
  if (stored != fnv1a(blob.data() + payload_offset, float_count * 4)) {
    throw DataError(where + "payload checksum mismatch");
  }

  ck.params = ModelParams::zeros(ck.config, ck.vocab_size);
  auto tensors = ck.params.tensors();
  if (tensors.size() != shapes.size()) throw DataError(where + "tensor list does not match config");
  std::size_t offset = payload_offset;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    Matrix& m = *tensors[i];
    if (m.rows() != shapes[i].first || m.cols() != shapes[i].second) {
      throw DataError(where + "tensor " + std::to_string(i) + " shape does not match config");
    }
    for (auto& v : m.values()) {
      v = static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(get_le(blob, offset, 4))));
      offset += 4;
    }
  }
  if (offset != payload_offset + float_count * 4) throw DataError(where + "float count mismatch");
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary& vocab) {
  Checkpoint ck = load_checkpoint(path);
  if (ck.vocab_size != vocab.size() || ck.token_checksum != vocab.token_checksum()) {
    throw DataError(path.string() + ": token vocabulary checksum mismatch (checkpoint " +
                    checksum_hex(ck.token_checksum) + ", vocabulary " +
                    checksum_hex(vocab.token_checksum()) + ")");
  }
  if (ck.label_checksum != vocab.label_checksum()) {
    throw DataError(path.string() + ": label set checksum mismatch (checkpoint " +
                    checksum_hex(ck.label_checksum) + ", labels " +
                    checksum_hex(vocab.label_checksum()) + ")");
  }
  return ck;
}

}  // namespace mrcnn
