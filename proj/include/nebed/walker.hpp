#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nebed/graph.hpp"
#include "nebed/partition.hpp"
#include "nebed/random.hpp"
#include "nebed/types.hpp"

namespace nebed {

class Manifest;

struct WalkConfig {
  std::size_t walk_distance = 10;   // steps per walk (k)
  std::size_t context_length = 5;   // augmentation window (l)
  std::size_t walks_per_node = 1;   // w
  std::uint64_t seed = 1;
  std::size_t episodes_per_epoch = 1;
  // Order walk groups by descending start-node degree before the round-robin
  // episode assignment instead of shuffling globally.
  bool degree_guided = false;

  /// Throws ArgumentError when k, l, w or episodes_per_epoch is zero.
  void validate() const;

  friend bool operator==(const WalkConfig&, const WalkConfig&) = default;
};

using WalkPath = std::vector<NodeId>;

/// Uniform first-order walk of at most `steps` steps; stops early at a node
/// without out-neighbors.
WalkPath random_walk(const Graph& g, NodeId start, std::size_t steps, SplitMix64& rng);

/// Forward window pairs (path[i], path[i+d]) for 1 <= d <= window.
std::vector<Sample> augment(std::span<const NodeId> path, std::size_t window);
void augment_into(std::span<const NodeId> path, std::size_t window, std::vector<Sample>& out);

/// Pair count of a full-length walk: k*m - m*(m-1)/2 with m = min(l, k).
std::uint64_t estimate_samples(std::uint64_t num_walks, std::size_t k, std::size_t l);

/// Seed of walk `walk_index` from `start` in `epoch`; independent of thread layout.
std::uint64_t walk_seed(std::uint64_t seed, std::uint64_t epoch, NodeId start,
                        std::size_t walk_index) noexcept;

/// Augmented samples of one epoch grouped by start node (ascending), each
/// group holding its walks in walk-index order. group_offsets has
/// node_count + 1 entries.
struct WalkSamples {
  std::vector<Sample> samples;
  std::vector<std::uint64_t> group_offsets;
};

/// OpenMP-parallel over start nodes. Output does not depend on thread count.
WalkSamples generate_samples(const Graph& g, const WalkConfig& cfg, std::uint64_t epoch);

/// Applies the configured ordering (seeded global shuffle, or degree-guided
/// grouping) and deals samples round-robin into episodes.
std::vector<std::vector<Sample>> assign_episodes(const Graph& g, const WalkConfig& cfg,
                                                 std::uint64_t epoch, WalkSamples walks);

/// Runs every walk of one epoch, writes episode/block sample files under
/// out_root/epoch_{epoch}/ plus MANIFEST and MANIFEST.done, and returns the
/// manifest. On failure the partial epoch directory is removed.
Manifest run_walk_engine(const Graph& g, const WalkConfig& cfg, const PartitionLayout& layout,
                         const std::filesystem::path& out_root, std::uint64_t epoch,
                         unsigned id_width = 4);

}  // namespace nebed
