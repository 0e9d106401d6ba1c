#pragma once

#include <vector>

#include "nebed/episode_store.hpp"
#include "nebed/generators.hpp"
#include "nebed/graph.hpp"
#include "nebed/walker.hpp"

namespace nebed::testing {

// In-memory episodes of one epoch, bucketed for `layout`.
inline std::vector<EpisodeSamples> make_episodes(const Graph& g, const WalkConfig& cfg,
                                                 const PartitionLayout& layout,
                                                 std::uint64_t epoch = 0) {
  auto episodes = assign_episodes(g, cfg, epoch, generate_samples(g, cfg, epoch));
  std::vector<EpisodeSamples> out;
  for (const auto& e : episodes) out.push_back(EpisodeSamples::bucket(e, layout));
  return out;
}

inline Graph random_graph(NodeId nodes, std::uint64_t edges, std::uint64_t seed) {
  return Graph::from_edges(nodes, random_edges(nodes, edges, seed), true);
}

}  // namespace nebed::testing
