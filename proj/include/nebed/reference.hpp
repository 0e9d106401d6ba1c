#pragma once

// Single-threaded reference versions of the parallel kernels. They define
// the expected results that the threaded runtime and the OpenMP kernels are
// tested against, and serve as the baseline in the benchmarks.

#include <cstdint>
#include <span>
#include <vector>

#include "nebed/embedding.hpp"
#include "nebed/episode_store.hpp"
#include "nebed/evaluator.hpp"
#include "nebed/scheduler.hpp"
#include "nebed/train_block.hpp"
#include "nebed/walker.hpp"

namespace nebed {

/// Trains every block of one episode on the global matrices in plan order,
/// worker-major within each step, with the runtime's seeds and noise tables.
/// `seed` is the negative-sampling seed (Runtime::effective_seed()).
BlockStats replay_sequential(const EpisodePlan& plan, const PartitionLayout& layout,
                             std::span<const std::uint64_t> degrees, const TrainConfig& cfg,
                             std::uint64_t seed, const EpisodeSamples& samples,
                             EmbeddingMatrix& vertex, EmbeddingMatrix& context,
                             std::uint64_t epoch, std::uint64_t episode);

/// Same result as generate_samples, computed node by node on one thread.
WalkSamples generate_samples_serial(const Graph& g, const WalkConfig& cfg, std::uint64_t epoch);

/// Same result as score_pairs, on one thread.
std::vector<double> score_pairs_serial(std::span<const Edge> pairs, const EmbeddingMatrix& vertex,
                                       const EmbeddingMatrix& context,
                                       ScoreMode mode = ScoreMode::kVertexContext);

}  // namespace nebed
