#include "nebed/partition.hpp"

#include <algorithm>
#include <cstdio>

#include "nebed/binary_io.hpp"
#include "nebed/errors.hpp"
#include "nebed/graph.hpp"

namespace nebed {

std::size_t PartitionMap::find(NodeId id) const {
  if (id >= node_count()) {
    throw BoundsError("node id " + std::to_string(id) + " outside [0," +
                      std::to_string(node_count()) + ")");
  }
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), id);
  return static_cast<std::size_t>(it - boundaries.begin()) - 1;
}

PartitionMap partition_nodes(NodeId node_count, std::size_t parts) {
  if (parts == 0) throw ArgumentError("partition count must be >= 1");
  PartitionMap pm;
  pm.boundaries.resize(parts + 1);
  const NodeId base = node_count / parts;
  const NodeId extra = node_count % parts;
  pm.boundaries[0] = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    pm.boundaries[i + 1] = pm.boundaries[i] + base + (i < extra ? 1 : 0);
  }
  pm.has_empty = parts > node_count;
  return pm;
}

PartitionMap partition_nodes(const Graph& g, std::size_t parts) {
  return partition_nodes(g.node_count(), parts);
}

std::pair<std::size_t, std::size_t> block_of(NodeId src, NodeId dst, const PartitionMap& pm) {
  return {pm.find(src), pm.find(dst)};
}

void ClusterShape::validate() const {
  if (num_nodes == 0 || workers_per_node == 0 || subparts == 0 || sockets_per_node == 0) {
    throw ArgumentError("cluster shape counts must all be >= 1");
  }
  if (sockets_per_node > workers_per_node) {
    throw ArgumentError("sockets_per_node exceeds workers_per_node");
  }
}

PartitionLayout PartitionLayout::for_shape(NodeId node_count, const ClusterShape& shape) {
  shape.validate();
  PartitionLayout layout;
  layout.context = partition_nodes(node_count, shape.workers());

  auto& vb = layout.vertex.boundaries;
  vb.assign(1, 0);
  const auto by_node = partition_nodes(node_count, shape.num_nodes);
  for (std::size_t n = 0; n < shape.num_nodes; ++n) {
    const auto by_worker = partition_nodes(by_node.extent(n), shape.workers_per_node);
    for (std::size_t g = 0; g < shape.workers_per_node; ++g) {
      const auto by_subpart = partition_nodes(by_worker.extent(g), shape.subparts);
      for (std::size_t j = 0; j < shape.subparts; ++j) {
        vb.push_back(vb.back() + by_subpart.extent(j));
      }
    }
  }
  layout.vertex.has_empty = shape.total_subparts() > node_count;
  return layout;
}

std::string PartitionLayout::fingerprint() const {
  io::ByteWriter w;
  w.put<std::uint64_t>(vertex.size());
  for (auto b : vertex.boundaries) w.put<std::uint64_t>(b);
  w.put<std::uint64_t>(context.size());
  for (auto b : context.boundaries) w.put<std::uint64_t>(b);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(io::fnv1a(w.bytes())));
  return hex;
}

}  // namespace nebed
