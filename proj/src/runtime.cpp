#include "nebed/runtime.hpp"

#include <barrier>
#include <exception>
#include <future>
#include <map>
#include <random>
#include <thread>
#include <tuple>

#include "nebed/errors.hpp"

namespace nebed {
namespace {

using Clock = std::chrono::steady_clock;

std::string row_range(NodeId first, std::size_t rows) {
  return "[" + std::to_string(first) + "," + std::to_string(first + rows) + ")";
}

}  // namespace

std::optional<NoiseTable> context_noise_table(const PartitionLayout& layout, std::size_t part,
                                              std::span<const std::uint64_t> degrees) {
  const auto extent = layout.context.extent(part);
  if (extent == 0) return std::nullopt;
  return NoiseTable::build(degrees.subspan(layout.context.begin(part), extent), kNoisePower,
                           layout.context.begin(part));
}

Runtime::Runtime(EpisodePlan plan, PartitionLayout layout, std::span<const std::uint64_t> degrees,
                 TrainConfig cfg, RuntimeOptions options)
    : plan_(std::move(plan)),
      layout_(std::move(layout)),
      cfg_(cfg),
      options_(options),
      seed_(cfg.deterministic ? cfg.seed : derive_seed(cfg.seed, std::random_device{}())) {
  cfg_.validate();
  options_.channels.validate();
  if (layout_.vertex.size() != plan_.shape().total_subparts() ||
      layout_.context.size() != plan_.workers()) {
    throw ArgumentError("partition layout does not match the plan's block grid");
  }
  if (degrees.size() != layout_.context.node_count()) {
    throw ArgumentError("degree vector does not cover the node range");
  }
  for (std::size_t w = 0; w < plan_.workers(); ++w) {
    noise_.push_back(context_noise_table(layout_, w, degrees));
  }
  resident_.resize(plan_.workers());
}

void Runtime::check_matrices(const EmbeddingMatrix& vertex, const EmbeddingMatrix& context) const {
  const auto n = layout_.vertex.node_count();
  if (vertex.rows() != n || context.rows() != n || vertex.dim() != cfg_.dim ||
      context.dim() != cfg_.dim) {
    throw ArgumentError("embedding matrices must be " + std::to_string(n) + " x " +
                        std::to_string(cfg_.dim));
  }
}

void Runtime::stage_in_context(const EmbeddingMatrix& context, StageTimeline& timeline) {
  for (std::size_t w = 0; w < plan_.workers(); ++w) {
    const auto t0 = Clock::now();
    const auto first = layout_.context.begin(w) * cfg_.dim;
    const auto count = layout_.context.extent(w) * cfg_.dim;
    const auto src = context.values().subspan(first, count);
    resident_[w].values.assign(src.begin(), src.end());
    timeline.record(static_cast<int>(w), Stage::kStageIn, -1, t0, Clock::now());
  }
}

void Runtime::stage_out_context(EmbeddingMatrix& context, StageTimeline& timeline) {
  for (std::size_t w = 0; w < plan_.workers(); ++w) {
    const auto t0 = Clock::now();
    const auto first = layout_.context.begin(w) * cfg_.dim;
    std::copy(resident_[w].values.begin(), resident_[w].values.end(),
              context.values().begin() + static_cast<std::ptrdiff_t>(first));
    timeline.record(static_cast<int>(w), Stage::kStageOut, -1, t0, Clock::now());
  }
}

BlockStats Runtime::execute(const EpisodeSamples& samples, EmbeddingMatrix& vertex,
                            std::uint64_t epoch, std::uint64_t episode, StageTimeline& timeline) {
  if (samples.vertex_parts != layout_.vertex.size() ||
      samples.context_parts != layout_.context.size()) {
    throw ManifestError("episode block grid " + std::to_string(samples.vertex_parts) + "x" +
                        std::to_string(samples.context_parts) + " does not match the plan");
  }
  const std::size_t P = plan_.workers();
  const std::size_t dim = cfg_.dim;
  const auto& steps = plan_.steps();
  const auto round_length = plan_.shape().workers_per_node * plan_.shape().subparts;
  const float lr = static_cast<float>(cfg_.rate_for_epoch(epoch));

  OwnershipTable ownership(plan_.shape().total_subparts());
  std::map<std::tuple<std::size_t, std::size_t, TransferKind>, std::unique_ptr<CommChannel>>
      channels;
  for (const auto& st : steps) {
    for (const auto& t : st.transfers) {
      auto& ch = channels[{t.from, t.to, t.kind}];
      if (!ch) {
        ch = std::make_unique<CommChannel>(channel_kind(t.kind), t.from, t.to, options_.channels,
                                           options_.max_jitter_seconds,
                                           derive_seed(options_.jitter_seed, epoch, episode));
      }
    }
  }
  auto channel_for = [&](const Transfer& t) -> CommChannel& {
    return *channels.at({t.from, t.to, t.kind});
  };

  std::barrier sync(static_cast<std::ptrdiff_t>(P));
  // Per (step, worker), summed in plan order so totals are reproducible.
  std::vector<BlockStats> stats(steps.size() * P);
  std::mutex error_mu;
  std::exception_ptr error;
  bool error_is_secondary = false;

  auto fail = [&](std::exception_ptr e, bool secondary) {
    {
      std::lock_guard lock(error_mu);
      if (!error || (error_is_secondary && !secondary)) {
        error = e;
        error_is_secondary = secondary;
      }
    }
    for (auto& [key, ch] : channels) ch->close();
  };

  auto worker_main = [&](std::size_t w) {
    const int wid = static_cast<int>(w);
    std::size_t step = 0;
    try {
      const RowBlock context_rows{layout_.context.begin(w), layout_.context.extent(w), dim,
                                  resident_[w].values};
      std::vector<Sample> sample_buffer;
      for (step = 0; step < steps.size(); ++step) {
        const auto& a = steps[step].assignments[w];
        const long sp = static_cast<long>(a.subpart);
        SubpartBuffer buffer;

        const auto arrival = plan_.arrival(step, w);
        if (arrival.from == Arrival::From::kHost) {
          const auto t0 = Clock::now();
          ownership.transfer(a.subpart, OwnershipTable::kHost, wid, "stage-in");
          buffer.subpart = a.subpart;
          buffer.first_row = layout_.vertex.begin(a.subpart);
          buffer.rows = layout_.vertex.extent(a.subpart);
          buffer.dim = dim;
          const auto src = vertex.values().subspan(buffer.first_row * dim, buffer.rows * dim);
          buffer.values.assign(src.begin(), src.end());
          timeline.record(wid, Stage::kStageIn, sp, t0, Clock::now());
        } else {
          DeliveryReceipt receipt;
          buffer = channel_for(arrival.transfer).receive(ownership, &receipt);
          if (receipt.hops == 2) {
            timeline.record(wid, Stage::kStageIn, sp, receipt.ready_at, Clock::now());
          }
          if (buffer.subpart != a.subpart) {
            throw ScheduleViolation("worker " + std::to_string(w) + " step " +
                                    std::to_string(step) + ": received sub-part " +
                                    std::to_string(buffer.subpart) + ", plan expects " +
                                    std::to_string(a.subpart));
          }
        }
        if (ownership.owner(a.subpart) != wid) {
          throw ScheduleViolation("worker " + std::to_string(w) + " step " +
                                  std::to_string(step) + " trains rows " +
                                  row_range(buffer.first_row, buffer.rows) + " it does not own");
        }

        const auto& block = samples.block(a.subpart, w);
        auto t0 = Clock::now();
        sample_buffer.assign(block.begin(), block.end());
        timeline.record(wid, Stage::kLoadSamples, sp, t0, Clock::now());

        t0 = Clock::now();
        if (!sample_buffer.empty()) {
          const RowBlock vertex_rows{buffer.first_row, buffer.rows, dim, buffer.values};
          SplitMix64 rng(block_seed(seed_, epoch, episode, a.subpart, w));
          static const NoiseTable kNoNoise = NoiseTable::build(std::vector<std::uint64_t>{1}, 1.0);
          const auto& noise = noise_[w] ? *noise_[w] : kNoNoise;
          try {
            stats[step * P + w] = train_block(sample_buffer, vertex_rows, context_rows, noise,
                                    cfg_.negatives, lr, rng);
          } catch (const ScheduleViolation& e) {
            throw ScheduleViolation("worker " + std::to_string(w) + " step " +
                                    std::to_string(step) + " rows " +
                                    row_range(buffer.first_row, buffer.rows) + ": " + e.what());
          }
        }
        timeline.record(wid, Stage::kTrain, sp, t0, Clock::now());

        if (const Transfer* out = plan_.departure(step, w)) {
          t0 = Clock::now();
          const auto receipt = channel_for(*out).send(std::move(buffer), ownership);
          const auto sent = Clock::now();
          if (out->kind == TransferKind::kInterRing) {
            timeline.record(wid, Stage::kStageOut, sp, t0, sent);
            timeline.record(wid, Stage::kInterNode, sp, sent, std::max(sent, receipt.ready_at));
          } else {
            timeline.record(wid, Stage::kPeerExchange, sp, t0, std::max(sent, receipt.ready_at));
          }
        } else {
          t0 = Clock::now();
          std::copy(buffer.values.begin(), buffer.values.end(),
                    vertex.values().begin() + static_cast<std::ptrdiff_t>(buffer.first_row * dim));
          ownership.transfer(a.subpart, wid, OwnershipTable::kHost, "write-back");
          timeline.record(wid, Stage::kStageOut, sp, t0, Clock::now());
        }

        if ((step + 1) % round_length == 0) sync.arrive_and_wait();
      }
    } catch (const ChannelClosed&) {
      fail(std::current_exception(), true);
      sync.arrive_and_drop();
    } catch (...) {
      fail(std::current_exception(), false);
      sync.arrive_and_drop();
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(P);
    for (std::size_t w = 0; w < P; ++w) threads.emplace_back(worker_main, w);
  }
  if (error) std::rethrow_exception(error);

  BlockStats total;
  for (const auto& s : stats) total += s;
  return total;
}

EpisodeResult Runtime::run_episode(const EpisodeSamples& samples, EmbeddingMatrix& vertex,
                                   EmbeddingMatrix& context, std::uint64_t epoch,
                                   std::uint64_t episode) {
  check_matrices(vertex, context);
  EpisodeResult result;
  const auto t0 = result.timeline.origin();
  stage_in_context(context, result.timeline);
  result.stats = execute(samples, vertex, epoch, episode, result.timeline);
  stage_out_context(context, result.timeline);
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

EpochResult Runtime::run_epoch(const EpisodeSampleStore& store, EmbeddingMatrix& vertex,
                               EmbeddingMatrix& context, std::uint64_t epoch, bool prefetch) {
  check_matrices(vertex, context);
  const auto& m = store.manifest();
  if (m.partition_hash != layout_.fingerprint()) {
    throw ManifestError("manifest partition hash " + m.partition_hash +
                        " does not match the trainer layout " + layout_.fingerprint());
  }
  if (m.episodes() == 0) throw ManifestError("manifest lists no episodes");

  EpochResult result;
  auto& timeline = result.timeline;
  const auto start = timeline.origin();
  auto load = [&](std::size_t s) {
    const auto t0 = Clock::now();
    auto episode = store.load_episode(s);
    timeline.record(kIoContext, Stage::kPrefetch, static_cast<long>(s), t0, Clock::now());
    return episode;
  };

  stage_in_context(context, timeline);
  EpisodeSamples current = load(0);
  for (std::size_t s = 0; s < m.episodes(); ++s) {
    std::future<EpisodeSamples> next;
    if (prefetch && s + 1 < m.episodes()) next = std::async(std::launch::async, load, s + 1);
    const auto t0 = Clock::now();
    try {
      result.stats += execute(current, vertex, epoch, s, timeline);
    } catch (...) {
      if (next.valid()) next.wait();
      throw;
    }
    result.episode_seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    if (s + 1 < m.episodes()) current = prefetch ? next.get() : load(s + 1);
  }
  stage_out_context(context, timeline);
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace nebed
