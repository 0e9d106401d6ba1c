#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nebed/partition.hpp"

namespace nebed {

class EpisodeSampleStore;

enum class TransferKind {
  kIntraRing,   // peer copy to the next worker on the same socket
  kHostStaged,  // next worker sits on another socket: device -> host -> device
  kInterRing,   // same worker slot on the next node group
};

const char* to_string(TransferKind kind) noexcept;

struct Assignment {
  std::size_t worker = 0;
  std::size_t subpart = 0;  // vertex partition index i
  std::size_t context = 0;  // context partition index j (== worker)
};

struct Transfer {
  std::size_t subpart = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  TransferKind kind = TransferKind::kIntraRing;

  friend bool operator==(const Transfer&, const Transfer&) = default;
};

struct PlanStep {
  std::size_t macro_round = 0;
  std::size_t rotation = 0;
  std::size_t slot = 0;
  std::vector<Assignment> assignments;  // indexed by worker
  std::vector<Transfer> transfers;      // issued once this step's training is done
};

/// Where a worker's sub-part for a step comes from.
struct Arrival {
  enum class From { kHost, kTransfer } from = From::kHost;
  Transfer transfer;  // valid when from == kTransfer
};

/// Hierarchical schedule of one episode: N macro-rounds x G rotations x k
/// slots. Context partition w stays on worker w; vertex sub-parts rotate along
/// the intra-node ring inside a macro-round and hop to the same worker slot of
/// the next node between macro-rounds.
class EpisodePlan {
 public:
  const ClusterShape& shape() const noexcept { return shape_; }
  const std::vector<PlanStep>& steps() const noexcept { return steps_; }
  std::size_t workers() const noexcept { return shape_.workers(); }

  std::size_t node_of(std::size_t worker) const noexcept {
    return worker / shape_.workers_per_node;
  }
  std::size_t socket_of(std::size_t worker) const noexcept;

  /// Source of the sub-part `worker` trains at `step`.
  Arrival arrival(std::size_t step, std::size_t worker) const;

  /// Transfer leaving `worker` after `step`, if any; nullopt means the
  /// sub-part is written back to host memory.
  const Transfer* departure(std::size_t step, std::size_t worker) const noexcept;

  /// Text dump: one line per (step, worker) assignment plus a transfer table.
  std::string dump() const;

  friend EpisodePlan build_schedule(const ClusterShape& shape);

 private:
  ClusterShape shape_;
  std::vector<PlanStep> steps_;
  // departures_[step * workers + worker], -1 when none
  std::vector<std::ptrdiff_t> departure_index_;
};

EpisodePlan build_schedule(const ClusterShape& shape);

/// Intra-node rings (one per node group, in worker order) nested in an
/// inter-node ring over node groups.
struct RingTopology {
  std::vector<std::vector<std::size_t>> intra;
  std::vector<std::size_t> inter;

  static RingTopology for_shape(const ClusterShape& shape);
};

/// (prev, next) of `worker` on its intra-node ring. Throws BoundsError for an
/// unknown worker.
std::pair<std::size_t, std::size_t> ring_neighbors(const RingTopology& topology,
                                                   std::size_t worker);

struct BlockRef {
  std::size_t worker = 0;
  std::size_t vertex_part = 0;
  std::size_t context_part = 0;

  friend bool operator==(const BlockRef&, const BlockRef&) = default;
};

/// Sample block each worker trains at `step`. Throws ArgumentError when the
/// layout does not match the plan's grid. When `store` is given, the blocks
/// are also resolved against its files for `episode`; a missing block raises
/// ManifestError naming it.
std::vector<BlockRef> blocks_for_step(const EpisodePlan& plan, std::size_t step,
                                      const PartitionLayout& layout,
                                      const EpisodeSampleStore* store = nullptr,
                                      std::size_t episode = 0);

}  // namespace nebed
