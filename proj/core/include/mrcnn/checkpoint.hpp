#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mrcnn/model_config.hpp"
#include "mrcnn/params.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {

inline constexpr char kCheckpointMagic[8] = {'M', 'R', 'C', 'N', 'N', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout (all integers little-endian), see docs/checkpoint_format.md:
//   [0, 8)    magic "MRCNNCKP"
//   [8, 12)   u32 format version
//   [12, 20)  u64 header length H
//   [20, 20+H) UTF-8 JSON header: config, vocab size and checksums, tensor
//             names and shapes, float count
//   float32 values of every tensor in flat enumeration order
//   u64 FNV-1a 64 of the float payload bytes
// Values are stored as 32-bit floats, so a round trip loses precision past
// roughly 7 significant digits.
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::size_t vocab_size = 0;
  std::uint64_t token_checksum = 0;
  std::uint64_t label_checksum = 0;
};

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const ModelConfig& config, const Vocabulary& vocab);

// Throws DataError on bad magic, unsupported version, malformed header,
// truncation or payload checksum mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// As above, and additionally refuses a checkpoint trained with a different
// token or label vocabulary.
Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary& vocab);

std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& text);

}  // namespace mrcnn
