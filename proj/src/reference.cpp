#include "nebed/reference.hpp"

#include <optional>

#include "nebed/errors.hpp"
#include "nebed/runtime.hpp"
#include "nebed/sgns.hpp"

namespace nebed {

BlockStats replay_sequential(const EpisodePlan& plan, const PartitionLayout& layout,
                             std::span<const std::uint64_t> degrees, const TrainConfig& cfg,
                             std::uint64_t seed, const EpisodeSamples& samples,
                             EmbeddingMatrix& vertex, EmbeddingMatrix& context,
                             std::uint64_t epoch, std::uint64_t episode) {
  std::vector<std::optional<NoiseTable>> noise;
  for (std::size_t j = 0; j < layout.context.size(); ++j) {
    noise.push_back(context_noise_table(layout, j, degrees));
  }
  const float lr = static_cast<float>(cfg.rate_for_epoch(epoch));
  BlockStats stats;
  for (const auto& step : plan.steps()) {
    for (const auto& a : step.assignments) {
      const auto& block = samples.block(a.subpart, a.context);
      if (block.empty()) continue;
      const auto vrows = vertex.slice(layout.vertex.begin(a.subpart),
                                      layout.vertex.extent(a.subpart));
      const auto crows = context.slice(layout.context.begin(a.context),
                                       layout.context.extent(a.context));
      SplitMix64 rng(block_seed(seed, epoch, episode, a.subpart, a.context));
      stats += train_block(block, vrows, crows, *noise[a.context], cfg.negatives, lr, rng);
    }
  }
  return stats;
}

WalkSamples generate_samples_serial(const Graph& g, const WalkConfig& cfg, std::uint64_t epoch) {
  cfg.validate();
  WalkSamples result;
  result.group_offsets.push_back(0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (std::size_t w = 0; w < cfg.walks_per_node; ++w) {
      SplitMix64 rng(walk_seed(cfg.seed, epoch, v, w));
      augment_into(random_walk(g, v, cfg.walk_distance, rng), cfg.context_length,
                   result.samples);
    }
    result.group_offsets.push_back(result.samples.size());
  }
  return result;
}

std::vector<double> score_pairs_serial(std::span<const Edge> pairs, const EmbeddingMatrix& vertex,
                                       const EmbeddingMatrix& context, ScoreMode mode) {
  const EmbeddingMatrix& right = mode == ScoreMode::kVertexContext ? context : vertex;
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.src >= vertex.rows() || p.dst >= right.rows()) {
      throw BoundsError("pair outside the embedding matrices");
    }
    scores.push_back(sgns_score<float>(vertex.row(p.src), right.row(p.dst)));
  }
  return scores;
}

}  // namespace nebed
