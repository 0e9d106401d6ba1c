#include <omp.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "nebed/errors.hpp"
#include "nebed/evaluator.hpp"
#include "nebed/reference.hpp"
#include "nebed/sgns.hpp"

using namespace nebed;
using nebed::testing::random_graph;

namespace {

double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double credit = 0;
  for (double p : pos) {
    for (double n : neg) credit += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return credit / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace

TEST_CASE("auc examples") {
  CHECK(auc(std::vector<double>{0.9}, std::vector<double>{0.1}) == 1.0);
  CHECK(auc(std::vector<double>{0.5}, std::vector<double>{0.5}) == 0.5);
  CHECK(auc(std::vector<double>{0.8, 0.4}, std::vector<double>{0.6, 0.2}) == 0.75);
  CHECK_THROWS_AS(auc(std::vector<double>{}, std::vector<double>{0.1}), ArgumentError);
  CHECK_THROWS_AS(auc(std::vector<double>{NAN}, std::vector<double>{0.1}), ArgumentError);
}

TEST_CASE("sort-based auc equals the pairwise count, ties included") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> pos(1 + rng.below(60)), neg(1 + rng.below(60));
    const auto levels = 1 + rng.below(12);  // few levels force ties
    for (auto& x : pos) x = static_cast<double>(rng.below(levels)) / levels;
    for (auto& x : neg) x = static_cast<double>(rng.below(levels)) / levels;
    CHECK(auc(pos, neg) == brute_auc(pos, neg));
  }
}

TEST_CASE("auc is invariant under increasing transforms and auc(x, x) = 0.5") {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pos(40), neg(30);
    for (auto& x : pos) x = rng.uniform();
    for (auto& x : neg) x = rng.uniform();
    auto f = [](double x) { return std::exp(3 * x) - 7; };
    std::vector<double> tp, tn;
    for (double x : pos) tp.push_back(f(x));
    for (double x : neg) tn.push_back(f(x));
    CHECK(auc(pos, neg) == auc(tp, tn));
    CHECK(auc(pos, pos) == 0.5);
  }
}

TEST_CASE("split with no test fraction keeps every edge for training") {
  const auto g = random_graph(100, 400, 1);
  const auto s = split_edges(g, 0.0, 0.0, 1);
  CHECK(s.test.empty());
  CHECK(s.valid.empty());
  CHECK(training_graph(s) == g);
}

TEST_CASE("split sizes, disjointness and determinism") {
  const auto g = random_graph(2000, 12000, 2);
  const auto s = split_edges(g, 0.1, 0.01, 3);
  const std::size_t units = g.edge_count() / 2 + 0;  // symmetric, no self loops
  CHECK(s.undirected);
  CHECK(s.test.size() == static_cast<std::size_t>(std::llround(0.1 * units)));
  CHECK(s.valid.size() == static_cast<std::size_t>(std::llround(0.01 * units)));
  CHECK(s.train.size() + s.test.size() + s.valid.size() == units);
  CHECK(s.test_negatives.size() == s.test.size());
  CHECK(s.valid_negatives.size() == s.valid.size());

  std::set<Edge> seen;
  for (const auto* part : {&s.train, &s.test, &s.valid}) {
    for (const auto& e : *part) CHECK(seen.insert(e).second);
  }
  const auto train = training_graph(s);
  for (const auto& e : s.test) {
    CHECK_FALSE(train.has_edge(e.src, e.dst));
    CHECK_FALSE(train.has_edge(e.dst, e.src));
  }
  for (const auto& e : s.test_negatives) CHECK_FALSE(g.has_edge(e.src, e.dst));
  CHECK(split_edges(g, 0.1, 0.01, 3) == s);
  CHECK_FALSE(split_edges(g, 0.1, 0.01, 4) == s);
}

TEST_CASE("directed graphs split by directed edge") {
  const auto g = Graph::from_edges(50, random_edges(50, 300, 4), false);
  const auto s = split_edges(g, 0.2, 0.0, 1);
  CHECK_FALSE(s.undirected);
  CHECK(s.test.size() + s.train.size() == g.edge_count());
}

TEST_CASE("a YouTube-sized edge count gives the expected test size") {
  CHECK(std::llround(0.01 * 4'945'382) == 49'454);
}

TEST_CASE("split argument errors") {
  const auto tiny = random_graph(5, 4, 5);
  CHECK_THROWS_AS(split_edges(tiny, 0.01, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(split_edges(tiny, 1.0, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(split_edges(tiny, 0.6, 0.5, 1), ArgumentError);
  CHECK_THROWS_AS(split_edges(tiny, -0.1, 0.0, 1), ArgumentError);
}

TEST_CASE("negative pairs avoid edges and self pairs") {
  auto complete = complete_edges(6);
  complete.erase(std::find(complete.begin(), complete.end(), Edge{4, 1}));
  const auto g = Graph::from_edges(6, complete);
  CHECK(gen_negative_pairs(g, 1, 3) == std::vector<Edge>{{4, 1}});
  CHECK(gen_negative_pairs(g, 0, 3).empty());
  CHECK_THROWS_AS(gen_negative_pairs(Graph::from_edges(6, complete_edges(6)), 1, 3), DensityError);

  const auto sparse = random_graph(300, 900, 6);
  const auto neg = gen_negative_pairs(sparse, 5000, 7);
  CHECK(neg.size() == 5000);
  for (const auto& e : neg) {
    CHECK(e.src != e.dst);
    CHECK_FALSE(sparse.has_edge(e.src, e.dst));
  }
}

TEST_CASE("score_pairs matches per-pair sgns_score in every mode") {
  const auto v = EmbeddingMatrix::uniform_init(50, 8, 1);
  auto c = EmbeddingMatrix::uniform_init(50, 8, 2);
  SplitMix64 rng(3);
  std::vector<Edge> pairs;
  for (int i = 0; i < 500; ++i) pairs.push_back({rng.below(50), rng.below(50)});
  for (auto mode : {ScoreMode::kVertexContext, ScoreMode::kVertexVertex}) {
    const auto& right = mode == ScoreMode::kVertexContext ? c : v;
    omp_set_num_threads(4);
    const auto scores = score_pairs(pairs, v, c, mode);
    CHECK(scores == score_pairs_serial(pairs, v, c, mode));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(scores[i] == sgns_score<float>(v.row(pairs[i].src), right.row(pairs[i].dst)));
    }
    auto reversed = pairs;
    std::reverse(reversed.begin(), reversed.end());
    auto rs = score_pairs(reversed, v, c, mode);
    std::reverse(rs.begin(), rs.end());
    CHECK(rs == scores);
  }
  omp_set_num_threads(omp_get_num_procs());
  CHECK_THROWS_AS(score_pairs(std::vector<Edge>{{50, 0}}, v, c), BoundsError);
  CHECK(parse_score_mode("vertex-vertex") == ScoreMode::kVertexVertex);
  CHECK_THROWS_AS(parse_score_mode("context"), ArgumentError);
}

TEST_CASE("zero embeddings score one half everywhere") {
  EmbeddingMatrix v(10, 4), c(10, 4);
  const std::vector<Edge> pairs{{0, 1}, {2, 3}, {9, 9}};
  for (double s : score_pairs(pairs, v, c)) CHECK(s == 0.5);
  const auto g = random_graph(200, 1000, 8);
  const auto split = split_edges(g, 0.1, 0.0, 1);
  EmbeddingMatrix zv(200, 4), zc(200, 4);
  const auto r = evaluate(split, zv, zc);
  CHECK(r.test_auc == 0.5);
  CHECK_FALSE(r.has_valid);
}
