#include "nebed/perfmodel.hpp"

#include <algorithm>

#include "nebed/errors.hpp"

namespace nebed {

void CostInputs::validate() const {
  if (nodes < 0 || edges < 0 || augmentation < 0) {
    throw ArgumentError("node, edge and augmentation counts must be non-negative");
  }
  if (id_bytes == 0 || real_bytes == 0) throw ArgumentError("id and real sizes must be positive");
}

MemoryBreakdown memory_cost(const CostInputs& in) {
  in.validate();
  MemoryBreakdown m;
  m.nodes = in.nodes * in.id_bytes;
  m.edges = in.edges * 2.0 * in.id_bytes;
  m.augmented_edges = in.samples() * 2.0 * in.id_bytes;
  m.vertex_embeddings = in.nodes * static_cast<double>(in.dim) * in.real_bytes;
  m.context_embeddings = m.vertex_embeddings;
  return m;
}

Intensity arithmetic_intensity(const CostInputs& in) {
  in.validate();
  const double pairs = 1.0 + static_cast<double>(in.negatives);
  const double d = static_cast<double>(in.dim);
  Intensity r;
  r.flops = 2.0 * d * pairs * 3.0;
  r.bytes = 2.0 * pairs * d * in.real_bytes;
  r.intensity = r.bytes > 0 ? r.flops / r.bytes : 0.0;
  return r;
}

TimelineEstimate timeline_estimate(const ClusterShape& shape, const CostInputs& in,
                                   const BandwidthProfile& bw, double compute_rate) {
  shape.validate();
  in.validate();
  bw.validate();
  if (!(compute_rate > 0)) throw ArgumentError("compute rate must be positive");

  const double P = static_cast<double>(shape.workers());
  const double subparts = static_cast<double>(shape.total_subparts());
  const double block_samples = in.samples() / (subparts * P);
  const double sub_bytes = in.nodes / subparts * static_cast<double>(in.dim) * in.real_bytes;

  TimelineEstimate t;
  t.steps = shape.total_subparts();
  t.intra_exchanges = shape.num_nodes * (shape.workers_per_node - 1) * shape.subparts;
  t.inter_boundaries = shape.num_nodes - 1;
  t.step_compute = block_samples * arithmetic_intensity(in).flops / compute_rate;
  t.sample_load = block_samples > 0 ? bw.host_staging.latency +
                                          block_samples * 2.0 * in.id_bytes /
                                              bw.host_staging.bandwidth
                                    : 0.0;
  const auto peer_kind =
      shape.sockets_per_node > 1 ? ChannelKind::kCrossSocketStaged : ChannelKind::kIntraP2P;
  t.peer_exchange = shape.workers_per_node > 1 ? transfer_seconds(bw, peer_kind, sub_bytes) : 0.0;
  t.inter_node = shape.num_nodes > 1 ? transfer_seconds(bw, ChannelKind::kInterNode, sub_bytes) : 0.0;
  const double hidden = static_cast<double>(shape.subparts - 1) * (t.step_compute + t.sample_load);
  t.inter_node_exposed = std::max(0.0, t.inter_node - hidden);
  const double host_copy = bw.host_staging.latency + sub_bytes / bw.host_staging.bandwidth;
  t.stage_in_out = sub_bytes > 0 ? 2.0 * host_copy : 0.0;

  t.compute_total = static_cast<double>(t.steps) * t.step_compute;
  t.total = static_cast<double>(t.steps) * (t.step_compute + t.sample_load) +
            static_cast<double>(t.intra_exchanges) * t.peer_exchange +
            static_cast<double>(t.inter_boundaries) * t.inter_node_exposed + t.stage_in_out;
  return t;
}

}  // namespace nebed
