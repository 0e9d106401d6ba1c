#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nebed/embedding.hpp"
#include "nebed/graph.hpp"
#include "nebed/types.hpp"

namespace nebed {

/// Held-out edges for link prediction. On a symmetric graph every unit is an
/// undirected pair stored once with src <= dst, and both directions of a
/// held-out pair are removed from training.
struct EvalSplit {
  NodeId node_count = 0;
  bool undirected = false;
  std::vector<Edge> train;
  std::vector<Edge> test;
  std::vector<Edge> valid;
  std::vector<Edge> test_negatives;
  std::vector<Edge> valid_negatives;

  friend bool operator==(const EvalSplit&, const EvalSplit&) = default;
};

/// Uniform random split of the graph's edges. |test| = round(test_frac * M)
/// and |valid| = round(valid_frac * M) for M split units; negatives are drawn
/// 1:1 against the full graph. Throws ArgumentError for fractions outside
/// [0, 1), a sum >= 1, or a positive test fraction that rounds to no edges.
EvalSplit split_edges(const Graph& g, double test_frac, double valid_frac, std::uint64_t seed);

/// The graph the walk engine and trainer see: `g` without held-out edges.
Graph training_graph(const EvalSplit& split);

/// `n` uniform pairs (u, v), u != v, with no edge u -> v in `g`. Throws
/// DensityError when the graph has no such pair or 1000 * n consecutive draws
/// are rejected.
std::vector<Edge> gen_negative_pairs(const Graph& g, std::size_t n, std::uint64_t seed);

enum class ScoreMode { kVertexContext, kVertexVertex };

const char* to_string(ScoreMode mode) noexcept;
ScoreMode parse_score_mode(std::string_view text);

/// sigma(row_u . row_v) per pair. vertex-context pairs vertex row u with
/// context row v, matching the training objective. Throws BoundsError for an
/// id outside the matrices. OpenMP-parallel; output order follows `pairs`.
std::vector<double> score_pairs(std::span<const Edge> pairs, const EmbeddingMatrix& vertex,
                                const EmbeddingMatrix& context,
                                ScoreMode mode = ScoreMode::kVertexContext);

/// Rank AUC with half credit for ties, exact for any input without NaN.
/// Throws ArgumentError on an empty list or a NaN score.
double auc(std::span<const double> pos, std::span<const double> neg);

struct EvalResult {
  double test_auc = 0.0;
  double valid_auc = 0.0;  // 0 when there are no validation edges
  bool has_valid = false;
};

EvalResult evaluate(const EvalSplit& split, const EmbeddingMatrix& vertex,
                    const EmbeddingMatrix& context, ScoreMode mode = ScoreMode::kVertexContext);

}  // namespace nebed
