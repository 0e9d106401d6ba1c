#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nebed/partition.hpp"
#include "nebed/types.hpp"
#include "nebed/walker.hpp"

namespace nebed {

/// Per-epoch record of what the walk engine wrote: config echo, partition
/// fingerprint and the per-episode sample count of every block.
class Manifest {
 public:
  std::uint64_t epoch = 0;
  WalkConfig walk;
  unsigned id_width = 4;
  NodeId node_count = 0;
  std::size_t vertex_parts = 1;
  std::size_t context_parts = 1;
  std::string partition_hash;
  // counts[episode][i * context_parts + j]
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t episodes() const noexcept { return counts.size(); }
  std::uint64_t count(std::size_t episode, std::size_t i, std::size_t j) const {
    return counts.at(episode).at(i * context_parts + j);
  }
  std::uint64_t episode_total(std::size_t episode) const;
  std::uint64_t total() const;

  std::string to_text() const;
  static Manifest parse(std::string_view text);

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct BlockHeader {
  unsigned id_width = 4;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
};

void write_block_file(const std::filesystem::path& path, std::span<const Sample> samples,
                      unsigned id_width, std::uint64_t seed);
std::vector<Sample> read_block_file(const std::filesystem::path& path,
                                    BlockHeader* header = nullptr);

/// Samples of one episode bucketed by (vertex sub-part, context partition).
struct EpisodeSamples {
  std::size_t vertex_parts = 0;
  std::size_t context_parts = 0;
  std::vector<std::vector<Sample>> blocks;

  const std::vector<Sample>& block(std::size_t i, std::size_t j) const {
    return blocks.at(i * context_parts + j);
  }
  std::uint64_t total() const;

  /// Buckets samples by layout.block_of, keeping their relative order.
  static EpisodeSamples bucket(std::span<const Sample> samples, const PartitionLayout& layout);
};

std::filesystem::path epoch_dir(const std::filesystem::path& root, std::uint64_t epoch);
std::filesystem::path block_path(const std::filesystem::path& root, std::uint64_t epoch,
                                 std::size_t episode, std::size_t i, std::size_t j);

/// Read side of the on-disk episode layout for one epoch.
class EpisodeSampleStore {
 public:
  /// Requires MANIFEST.done; throws ManifestError otherwise.
  static EpisodeSampleStore open(const std::filesystem::path& root, std::uint64_t epoch);

  /// True once the walk engine has finished writing `epoch`.
  static bool complete(const std::filesystem::path& root, std::uint64_t epoch);

  const Manifest& manifest() const noexcept { return manifest_; }
  std::size_t episodes() const noexcept { return manifest_.episodes(); }

  /// Reads every block file of the episode, checking counts against the
  /// manifest. A missing file raises ManifestError naming the block.
  EpisodeSamples load_episode(std::size_t episode) const;

  std::filesystem::path block_file(std::size_t episode, std::size_t i, std::size_t j) const {
    return block_path(root_, manifest_.epoch, episode, i, j);
  }
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
  Manifest manifest_;
};

}  // namespace nebed
