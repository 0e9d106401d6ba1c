#include "nebed/generators.hpp"

#include <numeric>

#include "nebed/errors.hpp"
#include "nebed/random.hpp"

namespace nebed {

std::vector<Edge> random_edges(NodeId nodes, std::uint64_t edges, std::uint64_t seed) {
  if (nodes < 2 && edges > 0) throw ArgumentError("random edges need at least two nodes");
  std::vector<Edge> out;
  out.reserve(edges);
  SplitMix64 rng(seed);
  while (out.size() < edges) {
    const NodeId u = rng.below(nodes);
    const NodeId v = rng.below(nodes);
    if (u != v) out.push_back({u, v});
  }
  return out;
}

std::vector<Edge> community_edges(NodeId nodes, std::size_t communities,
                                  std::size_t intra_degree, std::size_t inter_degree,
                                  std::uint64_t seed) {
  if (communities == 0 || nodes < 2 * communities) {
    throw ArgumentError("need at least two nodes per community");
  }
  const NodeId size = nodes / communities;
  std::vector<Edge> out;
  out.reserve(nodes * (intra_degree + inter_degree));
  SplitMix64 rng(seed);
  for (NodeId u = 0; u < nodes; ++u) {
    const NodeId group = std::min<NodeId>(u / size, communities - 1);
    const NodeId first = group * size;
    const NodeId extent = group + 1 == communities ? nodes - first : size;
    for (std::size_t e = 0; e < intra_degree; ++e) {
      const NodeId v = first + rng.below(extent);
      if (v != u) out.push_back({u, v});
    }
    if (communities == 1) continue;
    for (std::size_t e = 0; e < inter_degree; ++e) {
      const NodeId v = rng.below(nodes);
      if (v != u) out.push_back({u, v});
    }
  }
  // Scatter group members over the id space. Contiguous groups would line up
  // with contiguous context partitions, where local-only negatives never
  // separate one community from another.
  std::vector<NodeId> label(nodes);
  std::iota(label.begin(), label.end(), NodeId{0});
  for (NodeId i = nodes; i > 1; --i) std::swap(label[i - 1], label[rng.below(i)]);
  for (auto& e : out) e = {label[e.src], label[e.dst]};
  return out;
}

std::vector<Edge> complete_edges(NodeId nodes) {
  std::vector<Edge> out;
  out.reserve(nodes * (nodes > 0 ? nodes - 1 : 0));
  for (NodeId u = 0; u < nodes; ++u) {
    for (NodeId v = 0; v < nodes; ++v) {
      if (u != v) out.push_back({u, v});
    }
  }
  return out;
}

}  // namespace nebed
