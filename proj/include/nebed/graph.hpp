#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nebed/types.hpp"

namespace nebed {

enum class EdgeFormat { kText, kBinary };

struct LoadOptions {
  EdgeFormat format = EdgeFormat::kText;
  unsigned id_width = 4;    // 4 or 8 bytes; ids above the width's range are rejected
  bool symmetrize = false;  // add reverse edges and drop duplicate pairs
};

/// Directed graph in CSR layout. Neighbor lists are sorted by target id, so
/// the same edge multiset always produces the same Graph regardless of input
/// order or file format. Immutable after construction.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  /// Builds a graph from an edge list. Every endpoint must be < node_count.
  static Graph from_edges(NodeId node_count, std::span<const Edge> edges,
                          bool symmetrize = false);

  NodeId node_count() const noexcept { return offsets_.size() - 1; }
  std::uint64_t edge_count() const noexcept { return targets_.size(); }
  bool symmetric() const noexcept { return symmetric_; }

  std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> targets() const noexcept { return targets_; }

  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  std::uint64_t out_degree(NodeId u) const noexcept {
    return offsets_[u + 1] - offsets_[u];
  }
  std::vector<std::uint64_t> out_degrees() const;

  /// O(log deg) membership test on the sorted adjacency.
  bool has_edge(NodeId u, NodeId v) const noexcept;

  /// All edges in CSR order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> targets_;
  bool symmetric_ = false;
};

Graph load_edge_list(const std::filesystem::path& path, const LoadOptions& options = {});

/// Parses the text edge-list format from an in-memory buffer.
std::vector<Edge> parse_text_edges(std::string_view text, unsigned id_width = 4);

void save_edge_list(const std::filesystem::path& path, std::span<const Edge> edges,
                    EdgeFormat format, unsigned id_width = 4);

}  // namespace nebed
