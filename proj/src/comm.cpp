#include "nebed/comm.hpp"

#include <cmath>
#include <thread>

#include "nebed/errors.hpp"

namespace nebed {

void BandwidthProfile::validate() const {
  for (const auto* link : {&intra_p2p, &cross_socket, &host_staging, &inter_node}) {
    if (!(link->bandwidth > 0.0)) throw ArgumentError("bandwidths must be positive");
    if (!(link->latency >= 0.0)) throw ArgumentError("latencies must be non-negative");
  }
  if (!(cross_socket_penalty > 0.0)) throw ArgumentError("cross-socket penalty must be positive");
}

ChannelKind channel_kind(TransferKind kind) noexcept {
  switch (kind) {
    case TransferKind::kIntraRing: return ChannelKind::kIntraP2P;
    case TransferKind::kHostStaged: return ChannelKind::kCrossSocketStaged;
    case TransferKind::kInterRing: return ChannelKind::kInterNode;
  }
  return ChannelKind::kIntraP2P;
}

double transfer_seconds(const BandwidthProfile& profile, ChannelKind kind, double bytes) noexcept {
  switch (kind) {
    case ChannelKind::kIntraP2P:
      return profile.intra_p2p.latency + bytes / profile.intra_p2p.bandwidth;
    case ChannelKind::kCrossSocketStaged:
      return profile.cross_socket.latency +
             bytes / profile.cross_socket.bandwidth * profile.cross_socket_penalty;
    case ChannelKind::kInterNode:
      return profile.inter_node.latency + bytes / profile.inter_node.bandwidth;
  }
  return 0.0;
}

OwnershipTable::OwnershipTable(std::size_t subparts)
    : owners_(std::make_unique<std::atomic<int>[]>(subparts)), size_(subparts) {
  for (std::size_t i = 0; i < size_; ++i) owners_[i].store(kHost);
}

void OwnershipTable::transfer(std::size_t subpart, int expected, int next, const char* action) {
  if (subpart >= size_) throw OwnershipViolation("unknown sub-part " + std::to_string(subpart));
  int seen = expected;
  if (!owners_[subpart].compare_exchange_strong(seen, next)) {
    throw OwnershipViolation(std::string(action) + " of sub-part " + std::to_string(subpart) +
                             ": expected holder " + std::to_string(expected) + ", found " +
                             std::to_string(seen));
  }
}

CommChannel::CommChannel(ChannelKind kind, std::size_t from, std::size_t to,
                         const BandwidthProfile& profile, double max_jitter_seconds,
                         std::uint64_t jitter_seed)
    : kind_(kind),
      from_(from),
      to_(to),
      profile_(profile),
      max_jitter_(max_jitter_seconds),
      jitter_rng_(derive_seed(jitter_seed, from, to)) {}

DeliveryReceipt CommChannel::send(SubpartBuffer buffer, OwnershipTable& ownership) {
  ownership.transfer(buffer.subpart, static_cast<int>(from_), OwnershipTable::kInFlight, "send");

  Message msg;
  msg.receipt.subpart = buffer.subpart;
  msg.receipt.from = from_;
  msg.receipt.to = to_;
  msg.receipt.bytes = buffer.bytes();
  msg.receipt.hops = kind_ == ChannelKind::kIntraP2P ? 1 : 2;
  if (kind_ != ChannelKind::kIntraP2P) {
    // First hop: device -> host staging buffer.
    msg.staged = buffer.values;
    buffer.values = {};
  }
  msg.buffer = std::move(buffer);

  std::lock_guard lock(mu_);
  if (closed_) throw ChannelClosed("send on closed channel");
  const auto now = Clock::now();
  const double seconds =
      transfer_seconds(profile_, kind_, static_cast<double>(msg.receipt.bytes)) +
      (max_jitter_ > 0.0 ? jitter_rng_.uniform() * max_jitter_ : 0.0);
  const double serialization = transfer_seconds(profile_, kind_, static_cast<double>(msg.receipt.bytes)) -
                               transfer_seconds(profile_, kind_, 0.0);
  auto to_duration = [](double s) {
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
  };
  // Messages leave in order on a serialized link and are delivered FIFO.
  const auto start = std::max(now, link_free_);
  const auto ready = std::max(start + to_duration(seconds), last_ready_);
  link_free_ = start + to_duration(serialization);
  last_ready_ = ready;
  msg.receipt.simulated_seconds = seconds;
  msg.receipt.sent_at = now;
  msg.receipt.ready_at = ready;
  const auto receipt = msg.receipt;
  queue_.push_back(std::move(msg));
  cv_.notify_all();
  return receipt;
}

SubpartBuffer CommChannel::receive(OwnershipTable& ownership, DeliveryReceipt* receipt) {
  Message msg;
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) throw ChannelClosed("channel closed");
    msg = std::move(queue_.front());
    queue_.pop_front();
  }
  std::this_thread::sleep_until(msg.receipt.ready_at);
  if (msg.receipt.hops == 2) {
    // Second hop: host staging buffer -> receiving device.
    msg.buffer.values.assign(msg.staged.begin(), msg.staged.end());
  }
  ownership.transfer(msg.buffer.subpart, OwnershipTable::kInFlight, static_cast<int>(to_),
                     "receive");
  if (receipt) *receipt = msg.receipt;
  return std::move(msg.buffer);
}

void CommChannel::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

DeliveryReceipt exchange_subpart(std::size_t from, std::size_t to, SubpartBuffer& buffer,
                                 CommChannel& channel, OwnershipTable& ownership) {
  if (channel.from() != from || channel.to() != to) {
    throw ArgumentError("channel does not connect the given workers");
  }
  channel.send(buffer, ownership);
  DeliveryReceipt receipt;
  buffer = channel.receive(ownership, &receipt);
  return receipt;
}

}  // namespace nebed
