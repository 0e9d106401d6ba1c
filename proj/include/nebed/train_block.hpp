#pragma once

#include <cstdint>
#include <span>

#include "nebed/embedding.hpp"
#include "nebed/noise_table.hpp"
#include "nebed/random.hpp"
#include "nebed/types.hpp"

namespace nebed {

// Negatives are drawn proportional to degree^0.75.
inline constexpr double kNoisePower = 0.75;

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t negatives = 5;
  double learning_rate = 0.025;
  bool lr_decay = false;  // linear decay to learning_rate / 10 over the epochs
  std::size_t epochs = 1;
  std::uint64_t seed = 1;
  bool deterministic = true;

  void validate() const;
  double rate_for_epoch(std::size_t epoch) const noexcept;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct BlockStats {
  std::uint64_t samples = 0;
  std::uint64_t updates = 0;
  double loss_sum = 0.0;

  double mean_loss() const noexcept {
    return updates == 0 ? 0.0 : loss_sum / static_cast<double>(updates);
  }
  BlockStats& operator+=(const BlockStats& o) noexcept {
    samples += o.samples;
    updates += o.updates;
    loss_sum += o.loss_sum;
    return *this;
  }
};

/// Seed of the negative-sampling stream for one block of one episode.
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t epoch, std::uint64_t episode,
                         std::size_t vertex_part, std::size_t context_part) noexcept;

/// Trains one sample block in order: for every sample one positive update,
/// then `negatives` updates against rows drawn from `noise`. Every src must
/// lie in `vertex` and every dst in `context`; otherwise ScheduleViolation is
/// thrown before any row is touched.
BlockStats train_block(std::span<const Sample> samples, const RowBlock& vertex,
                       const RowBlock& context, const NoiseTable& noise,
                       std::size_t negatives, float learning_rate, SplitMix64& rng);

}  // namespace nebed
