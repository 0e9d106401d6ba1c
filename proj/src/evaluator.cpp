#include "nebed/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "nebed/errors.hpp"
#include "nebed/random.hpp"
#include "nebed/sgns.hpp"

namespace nebed {
namespace {

constexpr std::uint64_t kSplitStream = 0x53504c4954ULL;
constexpr std::uint64_t kTestNegStream = 0x544e4547ULL;
constexpr std::uint64_t kValidNegStream = 0x564e4547ULL;

void check_fraction(double f, const char* name) {
  if (!(f >= 0.0 && f < 1.0)) {
    throw ArgumentError(std::string(name) + " must lie in [0, 1), got " + std::to_string(f));
  }
}

std::size_t held_out(double frac, std::size_t units) {
  return static_cast<std::size_t>(std::llround(frac * static_cast<double>(units)));
}

}  // namespace

EvalSplit split_edges(const Graph& g, double test_frac, double valid_frac, std::uint64_t seed) {
  check_fraction(test_frac, "test fraction");
  check_fraction(valid_frac, "validation fraction");
  if (test_frac + valid_frac >= 1.0) {
    throw ArgumentError("test and validation fractions must sum to less than 1");
  }

  EvalSplit split;
  split.node_count = g.node_count();
  split.undirected = g.symmetric();
  std::vector<Edge> units = g.edges();
  if (split.undirected) {
    std::erase_if(units, [](const Edge& e) { return e.src > e.dst; });
  }

  const std::size_t n_test = held_out(test_frac, units.size());
  const std::size_t n_valid = held_out(valid_frac, units.size());
  if (test_frac > 0.0 && n_test == 0) {
    throw ArgumentError("test fraction " + std::to_string(test_frac) + " of " +
                        std::to_string(units.size()) + " edges yields no test edges");
  }

  SplitMix64 rng(derive_seed(seed, kSplitStream));
  for (std::size_t i = units.size(); i > 1; --i) std::swap(units[i - 1], units[rng.below(i)]);

  const auto test_end = units.begin() + static_cast<std::ptrdiff_t>(n_test);
  const auto valid_end = test_end + static_cast<std::ptrdiff_t>(n_valid);
  split.test.assign(units.begin(), test_end);
  split.valid.assign(test_end, valid_end);
  split.train.assign(valid_end, units.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.valid.begin(), split.valid.end());
  std::sort(split.train.begin(), split.train.end());

  split.test_negatives = gen_negative_pairs(g, split.test.size(), derive_seed(seed, kTestNegStream));
  split.valid_negatives =
      gen_negative_pairs(g, split.valid.size(), derive_seed(seed, kValidNegStream));
  return split;
}

Graph training_graph(const EvalSplit& split) {
  return Graph::from_edges(split.node_count, split.train, split.undirected);
}

std::vector<Edge> gen_negative_pairs(const Graph& g, std::size_t n, std::uint64_t seed) {
  std::vector<Edge> out;
  if (n == 0) return out;
  const NodeId nodes = g.node_count();
  std::uint64_t self_loops = 0;
  for (NodeId u = 0; u < nodes; ++u) self_loops += g.has_edge(u, u) ? 1 : 0;
  const double pairs = static_cast<double>(nodes) * static_cast<double>(nodes > 0 ? nodes - 1 : 0);
  const double present = static_cast<double>(g.edge_count() - self_loops);
  if (pairs - present < 1.0) {
    throw DensityError("graph has no non-adjacent node pair to use as a negative");
  }

  out.reserve(n);
  SplitMix64 rng(seed);
  const std::uint64_t limit = 1000 * static_cast<std::uint64_t>(n);
  std::uint64_t rejected = 0;
  while (out.size() < n) {
    const NodeId u = rng.below(nodes);
    const NodeId v = rng.below(nodes);
    if (u == v || g.has_edge(u, v)) {
      if (++rejected >= limit) {
        throw DensityError("no negative pair found in " + std::to_string(limit) +
                           " consecutive draws; graph too dense");
      }
      continue;
    }
    rejected = 0;
    out.push_back({u, v});
  }
  return out;
}

const char* to_string(ScoreMode mode) noexcept {
  return mode == ScoreMode::kVertexContext ? "vertex-context" : "vertex-vertex";
}

ScoreMode parse_score_mode(std::string_view text) {
  if (text == "vertex-context") return ScoreMode::kVertexContext;
  if (text == "vertex-vertex") return ScoreMode::kVertexVertex;
  throw ArgumentError("unknown score mode '" + std::string(text) +
                      "' (expected vertex-context or vertex-vertex)");
}

std::vector<double> score_pairs(std::span<const Edge> pairs, const EmbeddingMatrix& vertex,
                                const EmbeddingMatrix& context, ScoreMode mode) {
  const EmbeddingMatrix& right = mode == ScoreMode::kVertexContext ? context : vertex;
  if (vertex.dim() != right.dim()) throw ArgumentError("embedding dimensions differ");
  for (const auto& p : pairs) {
    if (p.src >= vertex.rows() || p.dst >= right.rows()) {
      throw BoundsError("pair (" + std::to_string(p.src) + ", " + std::to_string(p.dst) +
                        ") outside the embedding matrices");
    }
  }
  std::vector<double> scores(pairs.size());
  const auto count = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    scores[static_cast<std::size_t>(i)] = sgns_score<float>(vertex.row(p.src), right.row(p.dst));
  }
  return scores;
}

double auc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw ArgumentError("AUC needs positive and negative scores");
  auto has_nan = [](std::span<const double> xs) {
    return std::any_of(xs.begin(), xs.end(), [](double x) { return std::isnan(x); });
  };
  if (has_nan(pos) || has_nan(neg)) throw ArgumentError("AUC input contains NaN");

  std::vector<double> sorted(neg.begin(), neg.end());
  std::sort(sorted.begin(), sorted.end());
  // Twice the credit, so ties stay integral: 2 per negative below, 1 per tie.
  unsigned __int128 credit = 0;
  for (double p : pos) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), p);
    const auto hi = std::upper_bound(lo, sorted.end(), p);
    credit += 2 * static_cast<std::uint64_t>(lo - sorted.begin()) +
              static_cast<std::uint64_t>(hi - lo);
  }
  const double total = 2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size());
  return static_cast<double>(credit) / total;
}

EvalResult evaluate(const EvalSplit& split, const EmbeddingMatrix& vertex,
                    const EmbeddingMatrix& context, ScoreMode mode) {
  EvalResult r;
  r.test_auc = auc(score_pairs(split.test, vertex, context, mode),
                   score_pairs(split.test_negatives, vertex, context, mode));
  if (!split.valid.empty()) {
    r.has_valid = true;
    r.valid_auc = auc(score_pairs(split.valid, vertex, context, mode),
                      score_pairs(split.valid_negatives, vertex, context, mode));
  }
  return r;
}

}  // namespace nebed
