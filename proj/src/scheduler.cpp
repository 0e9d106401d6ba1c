#include "nebed/scheduler.hpp"

#include <sstream>

#include "nebed/episode_store.hpp"
#include "nebed/errors.hpp"

namespace nebed {

const char* to_string(TransferKind kind) noexcept {
  switch (kind) {
    case TransferKind::kIntraRing: return "intra-ring";
    case TransferKind::kHostStaged: return "host-staged";
    case TransferKind::kInterRing: return "inter-ring";
  }
  return "?";
}

std::size_t EpisodePlan::socket_of(std::size_t worker) const noexcept {
  const std::size_t g = worker % shape_.workers_per_node;
  const std::size_t G = shape_.workers_per_node;
  const std::size_t S = shape_.sockets_per_node;
  // Same remainder-first split as partition_nodes.
  const std::size_t base = G / S, extra = G % S;
  const std::size_t wide = extra * (base + 1);
  return g < wide ? g / (base + 1) : extra + (g - wide) / base;
}

EpisodePlan build_schedule(const ClusterShape& shape) {
  shape.validate();
  const std::size_t N = shape.num_nodes;
  const std::size_t G = shape.workers_per_node;
  const std::size_t k = shape.subparts;
  const std::size_t P = shape.workers();

  EpisodePlan plan;
  plan.shape_ = shape;
  plan.steps_.reserve(N * G * k);
  plan.departure_index_.assign(N * G * k * P, -1);

  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t t = 0; t < G; ++t) {
      for (std::size_t j = 0; j < k; ++j) {
        PlanStep step;
        step.macro_round = r;
        step.rotation = t;
        step.slot = j;
        const std::size_t s = plan.steps_.size();
        for (std::size_t w = 0; w < P; ++w) {
          const std::size_t n = w / G;
          const std::size_t g = w % G;
          const std::size_t home_node = (n + N - r) % N;
          // The offset r*(G-1) keeps the worker slot fixed across the
          // inter-node hop: a sub-part moves G-1 times inside a node.
          const std::size_t shift = (t + r * (G - 1)) % G;
          const std::size_t home_worker = (g + G - shift) % G;
          const std::size_t subpart = (home_node * G + home_worker) * k + j;
          step.assignments.push_back({w, subpart, w});

          if (t + 1 < G) {
            const std::size_t to = n * G + (g + 1) % G;
            const auto kind = plan.socket_of(w) == plan.socket_of(to) ? TransferKind::kIntraRing
                                                                      : TransferKind::kHostStaged;
            step.transfers.push_back({subpart, w, to, kind});
          } else if (r + 1 < N) {
            step.transfers.push_back({subpart, w, ((n + 1) % N) * G + g, TransferKind::kInterRing});
          } else {
            continue;
          }
          plan.departure_index_[s * P + w] = static_cast<std::ptrdiff_t>(step.transfers.size()) - 1;
        }
        plan.steps_.push_back(std::move(step));
      }
    }
  }
  return plan;
}

const Transfer* EpisodePlan::departure(std::size_t step, std::size_t worker) const noexcept {
  const auto idx = departure_index_[step * workers() + worker];
  return idx < 0 ? nullptr : &steps_[step].transfers[static_cast<std::size_t>(idx)];
}

Arrival EpisodePlan::arrival(std::size_t step, std::size_t worker) const {
  const auto& st = steps_.at(step);
  if (st.macro_round == 0 && st.rotation == 0) return {};
  // The sub-part was last trained k steps earlier (previous rotation, or the
  // last rotation of the previous macro-round) by the sender.
  const std::size_t prev = step - shape_.subparts;
  const std::size_t subpart = st.assignments[worker].subpart;
  for (const auto& tr : steps_[prev].transfers) {
    if (tr.subpart == subpart) return {Arrival::From::kTransfer, tr};
  }
  throw ScheduleViolation("no transfer delivers sub-part " + std::to_string(subpart) +
                          " for step " + std::to_string(step));
}

std::string EpisodePlan::dump() const {
  std::ostringstream out;
  out << "plan nodes=" << shape_.num_nodes << " workers_per_node=" << shape_.workers_per_node
      << " subparts=" << shape_.subparts << " sockets_per_node=" << shape_.sockets_per_node
      << " steps=" << steps_.size() << "\n";
  out << "# step worker subpart context block_i block_j\n";
  for (std::size_t s = 0; s < steps_.size(); ++s) {
    for (const auto& a : steps_[s].assignments) {
      out << s << ' ' << a.worker << ' ' << a.subpart << ' ' << a.context << ' ' << a.subpart
          << ' ' << a.context << "\n";
    }
  }
  out << "transfers\n# step subpart from to kind\n";
  for (std::size_t s = 0; s < steps_.size(); ++s) {
    for (const auto& t : steps_[s].transfers) {
      out << s << ' ' << t.subpart << ' ' << t.from << ' ' << t.to << ' ' << to_string(t.kind)
          << "\n";
    }
  }
  return out.str();
}

RingTopology RingTopology::for_shape(const ClusterShape& shape) {
  shape.validate();
  RingTopology topo;
  for (std::size_t n = 0; n < shape.num_nodes; ++n) {
    auto& ring = topo.intra.emplace_back();
    for (std::size_t g = 0; g < shape.workers_per_node; ++g) {
      ring.push_back(n * shape.workers_per_node + g);
    }
    topo.inter.push_back(n);
  }
  return topo;
}

std::pair<std::size_t, std::size_t> ring_neighbors(const RingTopology& topology,
                                                   std::size_t worker) {
  for (const auto& ring : topology.intra) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (ring[i] == worker) {
        return {ring[(i + ring.size() - 1) % ring.size()], ring[(i + 1) % ring.size()]};
      }
    }
  }
  throw BoundsError("worker " + std::to_string(worker) + " is not on any ring");
}

std::vector<BlockRef> blocks_for_step(const EpisodePlan& plan, std::size_t step,
                                      const PartitionLayout& layout,
                                      const EpisodeSampleStore* store, std::size_t episode) {
  const auto& shape = plan.shape();
  if (layout.vertex.size() != shape.total_subparts() ||
      layout.context.size() != shape.workers()) {
    throw ArgumentError("partition layout has " + std::to_string(layout.vertex.size()) + "x" +
                        std::to_string(layout.context.size()) + " ranges, plan needs " +
                        std::to_string(shape.total_subparts()) + "x" +
                        std::to_string(shape.workers()));
  }
  if (step >= plan.steps().size()) throw BoundsError("step out of range");
  std::vector<BlockRef> refs;
  for (const auto& a : plan.steps()[step].assignments) {
    if (store) {
      const auto& m = store->manifest();
      if (m.partition_hash != layout.fingerprint()) {
        throw ManifestError("manifest partition hash " + m.partition_hash +
                            " does not match layout " + layout.fingerprint());
      }
      const auto path = store->block_file(episode, a.subpart, a.context);
      if (episode >= m.episodes() || !std::filesystem::exists(path)) {
        throw ManifestError("missing block (" + std::to_string(a.subpart) + "," +
                            std::to_string(a.context) + ") of episode " +
                            std::to_string(episode) + ": " + path.string());
      }
    }
    refs.push_back({a.worker, a.subpart, a.context});
  }
  return refs;
}

}  // namespace nebed
