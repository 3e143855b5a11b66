#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mrcnn/matrix.hpp"
#include "mrcnn/model_config.hpp"
#include "mrcnn/params.hpp"
#include "mrcnn/vocabulary.hpp"

namespace mrcnn {

// A group of documents padded with Vocabulary::kPad to the longest member.
struct Batch {
  std::vector<std::size_t> indices;          // positions in the source dataset
  std::vector<std::vector<TokenId>> tokens;  // each of length max_length
  std::vector<std::size_t> lengths;          // original lengths
  std::size_t max_length = 0;

  std::size_t size() const noexcept { return indices.size(); }
};

// Shuffles with a stream determined by (seed, epoch), then cuts consecutive
// groups of batch_size (the last may be smaller). DataError on an empty
// dataset, ConfigError on batch_size 0.
std::vector<Batch> make_batches(const EncodedDataset& data, std::size_t batch_size,
                                std::uint64_t seed, std::uint64_t epoch);

// Same grouping in dataset order, no shuffle.
std::vector<Batch> make_sequential_batches(const EncodedDataset& data, std::size_t batch_size);

// N x l sigmoid probabilities in dataset order. Documents are padded inside
// their batch exactly as during training. Runs documents in parallel when
// OpenMP is available; results do not depend on the thread count.
Matrix predict(const ModelParams& params, const ModelConfig& config, const EncodedDataset& data,
               std::size_t batch_size = 16);

// One document at a time, no padding.
Matrix predict_unbatched(const ModelParams& params, const ModelConfig& config,
                         const EncodedDataset& data);

// N x l 0/1 target matrix.
Matrix target_matrix(const EncodedDataset& data);

}  // namespace mrcnn
