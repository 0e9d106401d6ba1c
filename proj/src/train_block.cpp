#include "nebed/train_block.hpp"

#include "nebed/errors.hpp"
#include "nebed/sgns.hpp"

namespace nebed {

void TrainConfig::validate() const {
  if (dim == 0) throw ArgumentError("dim must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be > 0");
  if (epochs == 0) throw ArgumentError("epochs must be >= 1");
}

double TrainConfig::rate_for_epoch(std::size_t epoch) const noexcept {
  if (!lr_decay || epochs <= 1) return learning_rate;
  const double progress = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return learning_rate * (1.0 - 0.9 * std::min(progress, 1.0));
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t epoch, std::uint64_t episode,
                         std::size_t vertex_part, std::size_t context_part) noexcept {
  return derive_seed(seed, epoch, episode, vertex_part, context_part);
}

BlockStats train_block(std::span<const Sample> samples, const RowBlock& vertex,
                       const RowBlock& context, const NoiseTable& noise,
                       std::size_t negatives, float learning_rate, SplitMix64& rng) {
  if (vertex.dim != context.dim) throw ArgumentError("vertex/context dim mismatch");
  if (negatives > 0 &&
      (noise.first() < context.first || noise.first() + noise.size() > context.end())) {
    throw ScheduleViolation("noise table range escapes the resident context partition");
  }
  for (const auto& s : samples) {
    if (!vertex.contains(s.src) || !context.contains(s.dst)) {
      throw ScheduleViolation("sample (" + std::to_string(s.src) + "," + std::to_string(s.dst) +
                              ") outside block rows [" + std::to_string(vertex.first) + "," +
                              std::to_string(vertex.end()) + ") x [" +
                              std::to_string(context.first) + "," +
                              std::to_string(context.end()) + ")");
    }
  }

  BlockStats stats;
  for (const auto& s : samples) {
    auto v = vertex.row(s.src);
    stats.loss_sum += sgns_update<float>(v, context.row(s.dst), 1, learning_rate);
    for (std::size_t n = 0; n < negatives; ++n) {
      stats.loss_sum += sgns_update<float>(v, context.row(noise.sample(rng)), 0, learning_rate);
    }
    ++stats.samples;
    stats.updates += 1 + negatives;
  }
  return stats;
}

}  // namespace nebed
