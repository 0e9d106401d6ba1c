#include "nebed/noise_table.hpp"

#include <cmath>

#include "nebed/errors.hpp"

namespace nebed {

NoiseTable NoiseTable::build(std::span<const std::uint64_t> degrees, double power, NodeId first) {
  const std::size_t n = degrees.size();
  if (n == 0) throw ArgumentError("noise table needs at least one entry");

  NoiseTable t;
  t.first_ = first;
  t.weights_.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.weights_[i] = degrees[i] == 0 ? 0.0 : std::pow(static_cast<double>(degrees[i]), power);
    total += t.weights_[i];
  }
  if (total == 0.0) {
    t.uniform_fallback_ = true;
    std::fill(t.weights_.begin(), t.weights_.end(), 1.0);
    total = static_cast<double>(n);
  }
  for (auto& w : t.weights_) w /= total;

  // Vose: scaled weights split into under- and over-full buckets.
  t.accept_.resize(n);
  t.alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint64_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = t.weights_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    t.accept_[s] = scaled[s];
    t.alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are full buckets up to rounding error.
  for (auto i : large) {
    t.accept_[i] = 1.0;
    t.alias_[i] = i;
  }
  for (auto i : small) {
    t.accept_[i] = 1.0;
    t.alias_[i] = i;
  }
  return t;
}

double NoiseTable::table_probability(std::size_t i) const {
  const double n = static_cast<double>(accept_.size());
  double p = accept_.at(i) / n;
  for (std::size_t b = 0; b < accept_.size(); ++b) {
    if (alias_[b] == i && b != i) p += (1.0 - accept_[b]) / n;
  }
  return p;
}

std::vector<NodeId> negative_sample(const NoiseTable& table, SplitMix64& rng, std::size_t m) {
  std::vector<NodeId> out(m);
  for (auto& x : out) x = table.sample(rng);
  return out;
}

}  // namespace nebed
