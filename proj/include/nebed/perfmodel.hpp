#pragma once

#include <cstdint>

#include "nebed/comm.hpp"
#include "nebed/partition.hpp"

namespace nebed {

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;
inline constexpr double kTiB = 1024.0 * kGiB;

struct CostInputs {
  double nodes = 0;         // |V|
  double edges = 0;         // |E|
  double augmentation = 1;  // samples per input edge (about k * l)
  std::size_t dim = 128;
  unsigned id_bytes = 4;
  unsigned real_bytes = 4;
  std::size_t negatives = 5;

  /// Throws ArgumentError on negative counts or zero-byte ids/reals.
  void validate() const;
  double samples() const noexcept { return edges * augmentation; }
};

/// Bytes per component. Report with kGiB / kTiB.
struct MemoryBreakdown {
  double nodes = 0;
  double edges = 0;
  double augmented_edges = 0;
  double vertex_embeddings = 0;
  double context_embeddings = 0;

  double total() const noexcept {
    return nodes + edges + augmented_edges + vertex_embeddings + context_embeddings;
  }
};

MemoryBreakdown memory_cost(const CostInputs& in);

/// Per training sample. A sample is 1 + m pair updates, each a d-length dot
/// product forward and twice that backward (6d flops), and each reading and
/// writing one context row; the vertex row stays cached across the sample.
struct Intensity {
  double flops = 0;
  double bytes = 0;
  double intensity = 0;  // flops per byte
};

Intensity arithmetic_intensity(const CostInputs& in);

/// Critical-path model of one episode on `shape`. Training, sample load and
/// intra-node exchange run back to back every step; inter-node hops overlap
/// the k - 1 steps between a sub-part's departure and its next use.
struct TimelineEstimate {
  std::size_t steps = 0;
  std::size_t intra_exchanges = 0;  // per worker
  std::size_t inter_boundaries = 0;
  double step_compute = 0;          // one block on one worker
  double sample_load = 0;           // per step
  double peer_exchange = 0;         // per intra-node exchange
  double inter_node = 0;            // per inter-node hop, before overlap
  double inter_node_exposed = 0;    // per boundary, after overlap
  double stage_in_out = 0;          // first stage-in plus last write-back
  double compute_total = 0;
  double total = 0;
};

/// `compute_rate` is flops per second of one worker. Samples of the whole
/// input are treated as one episode spread evenly over the block grid.
TimelineEstimate timeline_estimate(const ClusterShape& shape, const CostInputs& in,
                                   const BandwidthProfile& bw, double compute_rate);

}  // namespace nebed
