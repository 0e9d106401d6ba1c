#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nebed/comm.hpp"
#include "nebed/embedding.hpp"
#include "nebed/episode_store.hpp"
#include "nebed/noise_table.hpp"
#include "nebed/partition.hpp"
#include "nebed/scheduler.hpp"
#include "nebed/timeline.hpp"
#include "nebed/train_block.hpp"

namespace nebed {

struct RuntimeOptions {
  // Default: zero latency, unbounded bandwidth on every link.
  BandwidthProfile channels;
  // Extra uniform random delay per message, for liveness testing.
  double max_jitter_seconds = 0.0;
  std::uint64_t jitter_seed = 0;
};

struct EpisodeResult {
  BlockStats stats;
  StageTimeline timeline;
  double wall_seconds = 0.0;
};

struct EpochResult {
  BlockStats stats;
  StageTimeline timeline;
  std::vector<double> episode_seconds;
  double wall_seconds = 0.0;
};

/// Executes episode plans with one thread per worker. Each worker keeps its
/// context partition resident, trains the vertex sub-part the plan assigns it
/// at every step and forwards it along the two-level ring; sub-parts are only
/// ever held by one worker at a time.
class Runtime {
 public:
  /// `degrees` are the out-degrees of the training graph (noise tables).
  Runtime(EpisodePlan plan, PartitionLayout layout, std::span<const std::uint64_t> degrees,
          TrainConfig cfg, RuntimeOptions options = {});

  /// One episode with context partitions staged in before and written back after.
  EpisodeResult run_episode(const EpisodeSamples& samples, EmbeddingMatrix& vertex,
                            EmbeddingMatrix& context, std::uint64_t epoch,
                            std::uint64_t episode);

  /// All episodes of `store` in order. Context partitions stay resident for
  /// the whole epoch; with `prefetch` the next episode's blocks are read from
  /// disk while the current one trains.
  EpochResult run_epoch(const EpisodeSampleStore& store, EmbeddingMatrix& vertex,
                        EmbeddingMatrix& context, std::uint64_t epoch, bool prefetch = true);

  const EpisodePlan& plan() const noexcept { return plan_; }
  const PartitionLayout& layout() const noexcept { return layout_; }
  const TrainConfig& config() const noexcept { return cfg_; }
  /// Seed actually used for negative sampling (random in non-deterministic mode).
  std::uint64_t effective_seed() const noexcept { return seed_; }
  const std::optional<NoiseTable>& noise_table(std::size_t worker) const {
    return noise_.at(worker);
  }

 private:
  struct ResidentContext {
    std::vector<float> values;
  };

  void check_matrices(const EmbeddingMatrix& vertex, const EmbeddingMatrix& context) const;
  void stage_in_context(const EmbeddingMatrix& context, StageTimeline& timeline);
  void stage_out_context(EmbeddingMatrix& context, StageTimeline& timeline);
  BlockStats execute(const EpisodeSamples& samples, EmbeddingMatrix& vertex, std::uint64_t epoch,
                     std::uint64_t episode, StageTimeline& timeline);

  EpisodePlan plan_;
  PartitionLayout layout_;
  TrainConfig cfg_;
  RuntimeOptions options_;
  std::uint64_t seed_;
  std::vector<std::optional<NoiseTable>> noise_;
  std::vector<ResidentContext> resident_;
};

/// Noise table over context partition `part`, or nullopt for an empty range.
std::optional<NoiseTable> context_noise_table(const PartitionLayout& layout, std::size_t part,
                                              std::span<const std::uint64_t> degrees);

}  // namespace nebed
