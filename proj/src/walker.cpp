#include "nebed/walker.hpp"

#include <algorithm>
#include <numeric>

#include "nebed/binary_io.hpp"
#include "nebed/episode_store.hpp"
#include "nebed/errors.hpp"

namespace nebed {
namespace {

// Start nodes per OpenMP work item. Chunking only affects scheduling; results
// are concatenated in node order.
constexpr NodeId kWalkChunk = 1024;

}  // namespace

void WalkConfig::validate() const {
  if (walk_distance == 0) throw ArgumentError("walk distance k must be >= 1");
  if (context_length == 0) throw ArgumentError("context length l must be >= 1");
  if (walks_per_node == 0) throw ArgumentError("walks per node must be >= 1");
  if (episodes_per_epoch == 0) throw ArgumentError("episodes per epoch must be >= 1");
}

WalkPath random_walk(const Graph& g, NodeId start, std::size_t steps, SplitMix64& rng) {
  if (start >= g.node_count()) {
    throw BoundsError("walk start " + std::to_string(start) + " outside graph");
  }
  WalkPath path;
  path.reserve(steps + 1);
  path.push_back(start);
  NodeId current = start;
  for (std::size_t s = 0; s < steps; ++s) {
    auto next = g.neighbors(current);
    if (next.empty()) break;
    current = next[rng.below(next.size())];
    path.push_back(current);
  }
  return path;
}

void augment_into(std::span<const NodeId> path, std::size_t window, std::vector<Sample>& out) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::size_t last = std::min(path.size() - 1, i + window);
    for (std::size_t j = i + 1; j <= last; ++j) out.push_back({path[i], path[j]});
  }
}

std::vector<Sample> augment(std::span<const NodeId> path, std::size_t window) {
  std::vector<Sample> out;
  augment_into(path, window, out);
  return out;
}

std::uint64_t estimate_samples(std::uint64_t num_walks, std::size_t k, std::size_t l) {
  if (k == 0 || l == 0) throw ArgumentError("k and l must be >= 1");
  const std::uint64_t m = std::min(k, l);
  return num_walks * (k * m - m * (m - 1) / 2);
}

std::uint64_t walk_seed(std::uint64_t seed, std::uint64_t epoch, NodeId start,
                        std::size_t walk_index) noexcept {
  return derive_seed(seed, epoch) ^ derive_seed(start, walk_index);
}

WalkSamples generate_samples(const Graph& g, const WalkConfig& cfg, std::uint64_t epoch) {
  cfg.validate();
  const NodeId n = g.node_count();
  const auto chunks = static_cast<std::int64_t>((n + kWalkChunk - 1) / kWalkChunk);
  std::vector<std::vector<Sample>> chunk_samples(static_cast<std::size_t>(chunks));
  WalkSamples result;
  result.group_offsets.assign(n + 1, 0);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < chunks; ++c) {
    auto& out = chunk_samples[static_cast<std::size_t>(c)];
    const NodeId first = static_cast<NodeId>(c) * kWalkChunk;
    const NodeId last = std::min(n, first + kWalkChunk);
    // Full-length walks bound the count; walks ending at sinks emit fewer.
    out.reserve(estimate_samples(std::uint64_t{last - first} * cfg.walks_per_node,
                                 cfg.walk_distance, cfg.context_length));
    for (NodeId v = first; v < last; ++v) {
      const std::size_t before = out.size();
      for (std::size_t w = 0; w < cfg.walks_per_node; ++w) {
        SplitMix64 rng(walk_seed(cfg.seed, epoch, v, w));
        const auto path = random_walk(g, v, cfg.walk_distance, rng);
        augment_into(path, cfg.context_length, out);
      }
      // Per-node counts; turned into offsets below.
      result.group_offsets[v + 1] = out.size() - before;
    }
  }

  std::partial_sum(result.group_offsets.begin(), result.group_offsets.end(),
                   result.group_offsets.begin());
  result.samples.resize(result.group_offsets.back());
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    auto& chunk = chunk_samples[static_cast<std::size_t>(c)];
    const auto at = result.group_offsets[static_cast<std::size_t>(c) * kWalkChunk];
    std::copy(chunk.begin(), chunk.end(), result.samples.begin() + static_cast<std::ptrdiff_t>(at));
    std::vector<Sample>().swap(chunk);
  }
  return result;
}

std::vector<std::vector<Sample>> assign_episodes(const Graph& g, const WalkConfig& cfg,
                                                 std::uint64_t epoch, WalkSamples walks) {
  cfg.validate();
  const std::size_t episodes = cfg.episodes_per_epoch;
  std::vector<std::vector<Sample>> out(episodes);
  for (auto& e : out) e.reserve(walks.samples.size() / episodes + 1);

  if (!cfg.degree_guided) {
    // Seeded Fisher-Yates, then deal round-robin.
    auto& s = walks.samples;
    SplitMix64 rng(derive_seed(cfg.seed, epoch, 0x5348554646ULL));
    for (std::size_t i = s.size(); i > 1; --i) {
      std::swap(s[i - 1], s[rng.below(i)]);
    }
    for (std::size_t t = 0; t < s.size(); ++t) out[t % episodes].push_back(s[t]);
    return out;
  }

  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return g.out_degree(a) > g.out_degree(b);
  });
  std::size_t t = 0;
  for (NodeId v : order) {
    for (auto k = walks.group_offsets[v]; k < walks.group_offsets[v + 1]; ++k) {
      out[t++ % episodes].push_back(walks.samples[k]);
    }
  }
  for (std::size_t e = 0; e < episodes; ++e) {
    SplitMix64 rng(derive_seed(cfg.seed, epoch, 0x4445475245ULL, e));
    auto& s = out[e];
    for (std::size_t i = s.size(); i > 1; --i) std::swap(s[i - 1], s[rng.below(i)]);
  }
  return out;
}

Manifest run_walk_engine(const Graph& g, const WalkConfig& cfg, const PartitionLayout& layout,
                         const std::filesystem::path& out_root, std::uint64_t epoch,
                         unsigned id_width) {
  cfg.validate();
  if (layout.vertex.node_count() != g.node_count() ||
      layout.context.node_count() != g.node_count()) {
    throw ArgumentError("partition layout does not cover the graph's node range");
  }
  if (id_width != 4 && id_width != 8) throw ArgumentError("id width must be 4 or 8");

  const auto dir = epoch_dir(out_root, epoch);
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);

  Manifest manifest;
  manifest.epoch = epoch;
  manifest.walk = cfg;
  manifest.id_width = id_width;
  manifest.node_count = g.node_count();
  manifest.vertex_parts = layout.vertex.size();
  manifest.context_parts = layout.context.size();
  manifest.partition_hash = layout.fingerprint();

  try {
    auto episodes = assign_episodes(g, cfg, epoch, generate_samples(g, cfg, epoch));
    for (std::size_t s = 0; s < episodes.size(); ++s) {
      auto buckets = EpisodeSamples::bucket(episodes[s], layout);
      std::vector<Sample>().swap(episodes[s]);
      std::filesystem::create_directories(block_path(out_root, epoch, s, 0, 0).parent_path());
      auto& counts = manifest.counts.emplace_back();
      for (std::size_t i = 0; i < buckets.vertex_parts; ++i) {
        for (std::size_t j = 0; j < buckets.context_parts; ++j) {
          const auto& block = buckets.block(i, j);
          write_block_file(block_path(out_root, epoch, s, i, j), block, id_width, cfg.seed);
          counts.push_back(block.size());
        }
      }
    }
    io::write_text(dir / "MANIFEST", manifest.to_text());
    io::write_text(dir / "MANIFEST.done", "ok\n");
  } catch (const Error&) {
    std::filesystem::remove_all(dir, ec);
    throw;
  } catch (const std::filesystem::filesystem_error& e) {
    std::filesystem::remove_all(dir, ec);
    throw IoError(e.what());
  }
  return manifest;
}

}  // namespace nebed
