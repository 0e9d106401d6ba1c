#pragma once

#include <cstdint>
#include <vector>

#include "nebed/graph.hpp"
#include "nebed/types.hpp"

namespace nebed {

/// `edges` uniform random pairs (u != v) over `nodes`; duplicates are kept
/// in the list and collapse when symmetrized.
std::vector<Edge> random_edges(NodeId nodes, std::uint64_t edges, std::uint64_t seed);

/// Undirected graph with `communities` equal groups. Each node draws
/// `intra_degree` partners inside its group and `inter_degree` outside.
/// Dense within groups and sparse across, so held-out edges are predictable.
/// Group membership is a seeded random labelling, not contiguous id ranges.
std::vector<Edge> community_edges(NodeId nodes, std::size_t communities,
                                  std::size_t intra_degree, std::size_t inter_degree,
                                  std::uint64_t seed);

/// Every ordered pair u != v.
std::vector<Edge> complete_edges(NodeId nodes);

}  // namespace nebed
