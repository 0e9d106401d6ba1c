#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nebed/types.hpp"

namespace nebed {

class Graph;

/// Contiguous node-id ranges: partition i is [boundaries[i], boundaries[i+1]).
struct PartitionMap {
  std::vector<NodeId> boundaries{0};
  // Set when there are more partitions than nodes; trailing ranges are empty.
  bool has_empty = false;

  std::size_t size() const noexcept { return boundaries.size() - 1; }
  NodeId node_count() const noexcept { return boundaries.back(); }
  NodeId begin(std::size_t i) const noexcept { return boundaries[i]; }
  NodeId end(std::size_t i) const noexcept { return boundaries[i + 1]; }
  NodeId extent(std::size_t i) const noexcept { return boundaries[i + 1] - boundaries[i]; }

  /// Index of the partition containing `id` (binary search). Throws BoundsError.
  std::size_t find(NodeId id) const;

  friend bool operator==(const PartitionMap&, const PartitionMap&) = default;
};

/// Splits [0, node_count) into `parts` contiguous ranges whose sizes differ by
/// at most one; earlier ranges take the remainder.
PartitionMap partition_nodes(NodeId node_count, std::size_t parts);
PartitionMap partition_nodes(const Graph& g, std::size_t parts);

/// (source partition, destination partition) of an edge under a single map.
std::pair<std::size_t, std::size_t> block_of(NodeId src, NodeId dst, const PartitionMap& pm);

/// Cluster geometry: N node groups, G workers per group, k vertex sub-parts per
/// worker. Workers of a group may be spread over several sockets; ring hops
/// that cross a socket boundary are staged through host memory.
struct ClusterShape {
  std::size_t num_nodes = 1;
  std::size_t workers_per_node = 1;
  std::size_t subparts = 4;
  std::size_t sockets_per_node = 1;

  std::size_t workers() const noexcept { return num_nodes * workers_per_node; }
  std::size_t total_subparts() const noexcept { return workers() * subparts; }

  /// Throws ArgumentError unless every count is >= 1 and sockets <= workers.
  void validate() const;

  friend bool operator==(const ClusterShape&, const ClusterShape&) = default;
};

/// The two partition maps the trainer works with: N*G*k vertex sub-part ranges
/// (split hierarchically node -> worker -> sub-part) and N*G context ranges.
struct PartitionLayout {
  PartitionMap vertex;
  PartitionMap context;

  static PartitionLayout for_shape(NodeId node_count, const ClusterShape& shape);

  /// Block (vertex sub-part, context partition) of a sample.
  std::pair<std::size_t, std::size_t> block_of(NodeId src, NodeId dst) const {
    return {vertex.find(src), context.find(dst)};
  }

  /// Hex fingerprint of both boundary arrays.
  std::string fingerprint() const;

  friend bool operator==(const PartitionLayout&, const PartitionLayout&) = default;
};

}  // namespace nebed
