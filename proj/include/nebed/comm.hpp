#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include "nebed/random.hpp"
#include "nebed/scheduler.hpp"
#include "nebed/types.hpp"

namespace nebed {

struct LinkSpec {
  double bandwidth = std::numeric_limits<double>::infinity();  // bytes per second
  double latency = 0.0;                                         // seconds

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

/// Link speeds for every data path. Cross-socket transfers pay
/// `cross_socket_penalty` on top of the cross-socket link's serialization time.
struct BandwidthProfile {
  LinkSpec intra_p2p;
  LinkSpec cross_socket;
  LinkSpec host_staging;
  LinkSpec inter_node;
  double cross_socket_penalty = 1.3;

  /// Throws ArgumentError unless bandwidths and the penalty are positive and
  /// latencies non-negative.
  void validate() const;

  friend bool operator==(const BandwidthProfile&, const BandwidthProfile&) = default;
};

enum class ChannelKind { kIntraP2P, kCrossSocketStaged, kInterNode };

ChannelKind channel_kind(TransferKind kind) noexcept;

/// Simulated wall time to move `bytes` over a channel of `kind`.
double transfer_seconds(const BandwidthProfile& profile, ChannelKind kind, double bytes) noexcept;

/// A vertex sub-part in flight or resident on a worker.
struct SubpartBuffer {
  std::size_t subpart = 0;
  NodeId first_row = 0;
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> values;

  std::size_t bytes() const noexcept { return values.size() * sizeof(float); }
};

/// Single-writer bookkeeping for sub-parts: each one is held by the host, by
/// exactly one worker, or is in flight.
class OwnershipTable {
 public:
  static constexpr int kHost = -1;
  static constexpr int kInFlight = -2;

  explicit OwnershipTable(std::size_t subparts);

  int owner(std::size_t subpart) const noexcept { return owners_[subpart].load(); }

  /// Atomically moves the sub-part from `expected` to `next`; throws
  /// OwnershipViolation naming `action` if it is held elsewhere.
  void transfer(std::size_t subpart, int expected, int next, const char* action);

 private:
  std::unique_ptr<std::atomic<int>[]> owners_;
  std::size_t size_;
};

struct DeliveryReceipt {
  std::size_t subpart = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t bytes = 0;
  int hops = 1;  // 2 when routed through the host staging buffer
  double simulated_seconds = 0.0;
  std::chrono::steady_clock::time_point sent_at;
  std::chrono::steady_clock::time_point ready_at;
};

/// Exactly-once FIFO link between two workers with simulated latency and
/// bandwidth. Staged kinds copy the payload into a host staging buffer on send
/// and back out on receive.
class CommChannel {
 public:
  using Clock = std::chrono::steady_clock;

  CommChannel(ChannelKind kind, std::size_t from, std::size_t to, const BandwidthProfile& profile,
              double max_jitter_seconds = 0.0, std::uint64_t jitter_seed = 0);

  ChannelKind kind() const noexcept { return kind_; }
  std::size_t from() const noexcept { return from_; }
  std::size_t to() const noexcept { return to_; }

  /// Marks the sub-part in flight and enqueues it. Returns the predicted receipt.
  DeliveryReceipt send(SubpartBuffer buffer, OwnershipTable& ownership);

  /// Blocks until the head message is delivered, hands ownership to `to()`.
  /// Throws ChannelClosed when the channel is closed and drained.
  SubpartBuffer receive(OwnershipTable& ownership, DeliveryReceipt* receipt = nullptr);

  void close();

 private:
  struct Message {
    SubpartBuffer buffer;
    std::vector<float> staged;  // host copy for two-hop kinds
    DeliveryReceipt receipt;
  };

  ChannelKind kind_;
  std::size_t from_;
  std::size_t to_;
  BandwidthProfile profile_;
  double max_jitter_;
  SplitMix64 jitter_rng_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> queue_;
  Clock::time_point link_free_{};
  Clock::time_point last_ready_{};
  bool closed_ = false;
};

/// Synchronous send + receive of one sub-part.
DeliveryReceipt exchange_subpart(std::size_t from, std::size_t to, SubpartBuffer& buffer,
                                 CommChannel& channel, OwnershipTable& ownership);

}  // namespace nebed
