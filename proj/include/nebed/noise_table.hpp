#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nebed/random.hpp"
#include "nebed/types.hpp"

namespace nebed {

/// Walker/Vose alias table over the node range [first, first + size).
/// Drawing costs one bucket pick and one coin flip.
class NoiseTable {
 public:
  /// Weight of entry i is degrees[i]^power. All-zero degrees fall back to a
  /// uniform table. Throws ArgumentError on an empty degree list.
  static NoiseTable build(std::span<const std::uint64_t> degrees, double power,
                          NodeId first = 0);

  NodeId sample(SplitMix64& rng) const noexcept {
    const auto bucket = rng.below(accept_.size());
    return first_ + (rng.uniform() < accept_[bucket] ? bucket : alias_[bucket]);
  }

  std::size_t size() const noexcept { return accept_.size(); }
  NodeId first() const noexcept { return first_; }
  bool uniform_fallback() const noexcept { return uniform_fallback_; }

  /// Normalized target probability of entry i.
  double probability(std::size_t i) const noexcept { return weights_[i]; }
  /// Probability mass the alias structure actually assigns to entry i.
  double table_probability(std::size_t i) const;

  std::span<const double> accept() const noexcept { return accept_; }
  std::span<const std::uint64_t> alias() const noexcept { return alias_; }

 private:
  NodeId first_ = 0;
  bool uniform_fallback_ = false;
  std::vector<double> weights_;
  std::vector<double> accept_;
  std::vector<std::uint64_t> alias_;
};

/// m independent draws (duplicates allowed).
std::vector<NodeId> negative_sample(const NoiseTable& table, SplitMix64& rng, std::size_t m);

}  // namespace nebed
