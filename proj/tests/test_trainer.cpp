#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "nebed/embedding.hpp"
#include "nebed/errors.hpp"
#include "nebed/noise_table.hpp"
#include "nebed/sgns.hpp"
#include "nebed/train_block.hpp"
#include "test_util.hpp"

using namespace nebed;
using nebed::testing::TempDir;

namespace {

std::span<const float> cspan(const std::vector<float>& v) { return v; }

double norm(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("sgns_score is the clamped logistic of the dot product") {
  const std::vector<float> zero{0, 0}, e1{1, 0};
  CHECK(sgns_score(cspan(zero), cspan(zero)) == 0.5);
  CHECK(sgns_score(cspan(e1), cspan(e1)) == doctest::Approx(0.7310586).epsilon(1e-7));
  const std::vector<float> big{40}, one{1}, neg{-1};
  const double hi = sgns_score(cspan(big), cspan(one));
  const double lo = sgns_score(cspan(big), cspan(neg));
  CHECK(hi == logistic(kLogitClamp));
  CHECK(lo == logistic(-kLogitClamp));
  CHECK(hi < 1.0);
  CHECK(lo > 0.0);
  CHECK(std::isfinite(sgns_loss(cspan(big), cspan(neg), 1)));
  CHECK(std::isfinite(sgns_loss(cspan(big), cspan(one), 0)));
  CHECK(sgns_loss(cspan(big), cspan(neg), 1) == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("sgns_update on zero rows changes nothing") {
  for (int label : {0, 1}) {
    std::vector<float> v{0, 0, 0}, c{0, 0, 0};
    sgns_update<float>(v, c, label, 0.5f);
    CHECK(v == std::vector<float>{0, 0, 0});
    CHECK(c == std::vector<float>{0, 0, 0});
  }
}

TEST_CASE("sgns_update hand-evaluated step") {
  std::vector<double> v{1, 0}, c{1, 0};
  const double loss = sgns_update<double>(v, c, 1, 0.1);
  const double g = 1.0 / (1.0 + std::exp(-1.0)) - 1.0;
  CHECK(g == doctest::Approx(-0.2689414).epsilon(1e-6));
  CHECK(v[0] == doctest::Approx(1.0268941).epsilon(1e-7));
  CHECK(c[0] == doctest::Approx(1.0268941).epsilon(1e-7));
  CHECK(v[1] == 0.0);
  CHECK(c[1] == 0.0);
  CHECK(loss == doctest::Approx(-std::log(1.0 / (1.0 + std::exp(-1.0)))));
}

TEST_CASE("analytic gradients match central finite differences") {
  SplitMix64 rng(314);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.below(16);
    const int label = static_cast<int>(rng.below(2));
    std::vector<double> v(d), c(d);
    for (auto& x : v) x = rng.uniform() * 2 - 1;
    for (auto& x : c) x = rng.uniform() * 2 - 1;

    // With lr = 1 the step is exactly the gradient.
    auto v1 = v, c1 = c;
    sgns_update<double>(v1, c1, label, 1.0);
    std::vector<double> gv(d), gc(d), nv(d), nc(d);
    for (std::size_t i = 0; i < d; ++i) {
      gv[i] = v[i] - v1[i];
      gc[i] = c[i] - c1[i];
    }
    auto loss = [&](const std::vector<double>& a, const std::vector<double>& b) {
      return sgns_loss<double>(a, b, label);
    };
    for (std::size_t i = 0; i < d; ++i) {
      auto p = v, m = v;
      p[i] += h;
      m[i] -= h;
      nv[i] = (loss(p, c) - loss(m, c)) / (2 * h);
      p = c;
      m = c;
      p[i] += h;
      m[i] -= h;
      nc[i] = (loss(v, p) - loss(v, m)) / (2 * h);
    }
    std::vector<double> dv(d), dc(d);
    for (std::size_t i = 0; i < d; ++i) {
      dv[i] = gv[i] - nv[i];
      dc[i] = gc[i] - nc[i];
    }
    CHECK(norm(dv) <= 1e-4 * std::max(norm(gv), 1e-12));
    CHECK(norm(dc) <= 1e-4 * std::max(norm(gc), 1e-12));
  }
}

TEST_CASE("repeated positive updates raise the score monotonically") {
  std::vector<float> v{0.1f, -0.2f, 0.05f}, c{0, 0, 0};
  double prev = sgns_score(cspan(v), cspan(c));
  for (int i = 0; i < 200; ++i) {
    sgns_update<float>(v, c, 1, 0.025f);
    const double s = sgns_score(cspan(v), cspan(c));
    CHECK(s >= prev);
    prev = s;
  }
  CHECK(prev > 0.5);
}

TEST_CASE("noise table weights follow degree^0.75") {
  const std::vector<std::uint64_t> deg{1, 16};
  const auto t = NoiseTable::build(deg, 0.75);
  CHECK(t.probability(0) == doctest::Approx(1.0 / 9));
  CHECK(t.probability(1) == doctest::Approx(8.0 / 9));
  CHECK(t.table_probability(0) == doctest::Approx(1.0 / 9));
  CHECK(t.table_probability(1) == doctest::Approx(8.0 / 9));
  for (double a : t.accept()) {
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }

  const auto flat = NoiseTable::build(std::vector<std::uint64_t>{3, 3, 3, 3}, 0.75);
  for (std::size_t i = 0; i < 4; ++i) CHECK(flat.table_probability(i) == doctest::Approx(0.25));

  const auto zero = NoiseTable::build(std::vector<std::uint64_t>{0, 0, 0}, 0.75, 10);
  CHECK(zero.uniform_fallback());
  CHECK(zero.probability(2) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(NoiseTable::build(std::vector<std::uint64_t>{}, 0.75), ArgumentError);
}

TEST_CASE("noise table draws match the weights within 3 sigma") {
  SplitMix64 rng(77);
  std::vector<std::uint64_t> deg(25);
  for (auto& d : deg) d = rng.below(200);
  deg[3] = 0;
  const auto t = NoiseTable::build(deg, 0.75, 100);
  std::vector<std::uint64_t> hits(deg.size());
  const std::uint64_t draws = 1'000'000;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const NodeId id = t.sample(rng);
    REQUIRE(id >= 100);
    REQUIRE(id < 125);
    ++hits[id - 100];
  }
  CHECK(hits[3] == 0);
  for (std::size_t i = 0; i < deg.size(); ++i) {
    const double p = t.probability(i);
    const double sigma = std::sqrt(draws * p * (1 - p));
    CHECK(std::abs(static_cast<double>(hits[i]) - draws * p) <= 3 * sigma + 1e-9);
  }
}

TEST_CASE("negative_sample edge cases") {
  SplitMix64 rng(1);
  const auto t = NoiseTable::build(std::vector<std::uint64_t>{5}, 0.75, 42);
  CHECK(negative_sample(t, rng, 0).empty());
  CHECK(negative_sample(t, rng, 4) == std::vector<NodeId>{42, 42, 42, 42});
  const auto wide = NoiseTable::build(std::vector<std::uint64_t>{1, 2, 3, 4, 5}, 0.75);
  SplitMix64 a(9), b(9);
  CHECK(negative_sample(wide, a, 50) == negative_sample(wide, b, 50));
}

TEST_CASE("train_block on an empty list leaves rows untouched") {
  auto vm = EmbeddingMatrix::uniform_init(4, 3, 1);
  EmbeddingMatrix cm(4, 3);
  const auto before = vm;
  const auto noise = NoiseTable::build(std::vector<std::uint64_t>{1, 1, 1, 1}, 0.75);
  SplitMix64 rng(1);
  const auto stats = train_block({}, vm.slice(0, 4), cm.slice(0, 4), noise, 5, 0.025f, rng);
  CHECK(stats.updates == 0);
  CHECK(vm == before);
}

TEST_CASE("one sample with no negatives is one positive update") {
  EmbeddingMatrix vm(2, 2), cm(2, 2);
  vm.row(0)[0] = 0.3f;
  vm.row(0)[1] = -0.1f;
  cm.row(1)[0] = 0.2f;
  cm.row(1)[1] = 0.4f;
  std::vector<float> v(vm.row(0).begin(), vm.row(0).end());
  std::vector<float> c(cm.row(1).begin(), cm.row(1).end());
  sgns_update<float>(v, c, 1, 0.1f);

  const auto noise = NoiseTable::build(std::vector<std::uint64_t>{1, 1}, 0.75);
  SplitMix64 rng(1);
  const std::vector<Sample> one{{0, 1}};
  const auto stats = train_block(one, vm.slice(0, 2), cm.slice(0, 2), noise, 0, 0.1f, rng);
  CHECK(stats.samples == 1);
  CHECK(stats.updates == 1);
  CHECK(std::vector<float>(vm.row(0).begin(), vm.row(0).end()) == v);
  CHECK(std::vector<float>(cm.row(1).begin(), cm.row(1).end()) == c);
}

TEST_CASE("train_block is deterministic and touches only its own rows") {
  const std::size_t n = 40, d = 8;
  SplitMix64 gen(5);
  std::vector<Sample> samples;
  for (int i = 0; i < 300; ++i) samples.push_back({10 + gen.below(10), 20 + gen.below(10)});
  std::vector<std::uint64_t> deg(10);
  for (auto& x : deg) x = 1 + gen.below(9);
  const auto noise = NoiseTable::build(deg, kNoisePower, 20);

  auto run = [&](EmbeddingMatrix& vm, EmbeddingMatrix& cm) {
    SplitMix64 rng(block_seed(1, 0, 0, 1, 2));
    return train_block(samples, vm.slice(10, 10), cm.slice(20, 10), noise, 5, 0.025f, rng);
  };
  auto v1 = EmbeddingMatrix::uniform_init(n, d, 3), v2 = v1;
  auto c1 = EmbeddingMatrix::uniform_init(n, d, 4), c2 = c1;
  const auto v0 = v1, c0 = c1;
  const auto s1 = run(v1, c1);
  run(v2, c2);
  CHECK(v1 == v2);
  CHECK(c1 == c2);
  CHECK(s1.samples == 300);
  CHECK(s1.updates == 300 * 6);
  CHECK(s1.mean_loss() > 0);

  for (NodeId r = 0; r < n; ++r) {
    const bool vertex_rows = r >= 10 && r < 20;
    const bool context_rows = r >= 20 && r < 30;
    if (!vertex_rows) CHECK(std::equal(v1.row(r).begin(), v1.row(r).end(), v0.row(r).begin()));
    if (!context_rows) CHECK(std::equal(c1.row(r).begin(), c1.row(r).end(), c0.row(r).begin()));
  }
}

TEST_CASE("out-of-block samples are schedule violations before any update") {
  auto vm = EmbeddingMatrix::uniform_init(10, 4, 1);
  auto cm = EmbeddingMatrix::uniform_init(10, 4, 2);
  const auto v0 = vm, c0 = cm;
  const auto noise = NoiseTable::build(std::vector<std::uint64_t>{1, 1, 1, 1, 1}, 0.75, 5);
  SplitMix64 rng(1);
  const std::vector<Sample> samples{{0, 5}, {6, 5}};
  CHECK_THROWS_AS(train_block(samples, vm.slice(0, 5), cm.slice(5, 5), noise, 1, 0.1f, rng),
                  ScheduleViolation);
  CHECK(vm == v0);
  CHECK(cm == c0);
  const auto outside = NoiseTable::build(std::vector<std::uint64_t>{1, 1}, 0.75, 0);
  const std::vector<Sample> ok{{0, 5}};
  CHECK_THROWS_AS(train_block(ok, vm.slice(0, 5), cm.slice(5, 5), outside, 1, 0.1f, rng),
                  ScheduleViolation);
}

TEST_CASE("embeddings stay finite under long training") {
  auto vm = EmbeddingMatrix::uniform_init(50, 16, 1);
  EmbeddingMatrix cm(50, 16);
  SplitMix64 gen(2);
  std::vector<Sample> samples;
  for (int i = 0; i < 20000; ++i) samples.push_back({gen.below(50), gen.below(50)});
  const auto noise = NoiseTable::build(std::vector<std::uint64_t>(50, 3), 0.75);
  SplitMix64 rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    train_block(samples, vm.slice(0, 50), cm.slice(0, 50), noise, 5, 0.05f, rng);
  }
  CHECK(vm.all_finite());
  CHECK(cm.all_finite());
}

TEST_CASE("vertex init is uniform in the documented range and seeded") {
  const std::size_t d = 64;
  const auto m = EmbeddingMatrix::uniform_init(100, d, 9);
  float lo = 1, hi = -1;
  for (float x : m.values()) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo >= -0.5f / d);
  CHECK(hi <= 0.5f / d);
  CHECK(hi - lo > 0.9f / d);
  CHECK(m == EmbeddingMatrix::uniform_init(100, d, 9));
  CHECK_FALSE(m == EmbeddingMatrix::uniform_init(100, d, 10));
}

TEST_CASE("embedding files round-trip with the documented header") {
  TempDir dir("emb");
  const auto m = EmbeddingMatrix::uniform_init(7, 3, 1);
  save_embeddings(dir / "e.nebe", m);
  const auto bytes = io::read_file(dir / "e.nebe");
  REQUIRE(bytes.size() == 24 + 7 * 3 * 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "NEBE");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 4);
  CHECK(bytes[8] == 7);
  CHECK(bytes[16] == 3);
  CHECK(load_embeddings(dir / "e.nebe") == m);

  auto truncated = bytes;
  truncated.resize(30);
  io::write_file(dir / "bad.nebe", truncated);
  CHECK_THROWS_AS(load_embeddings(dir / "bad.nebe"), FormatError);

  save_embeddings_text(dir / "e.txt", m);
  const auto text = io::read_text(dir / "e.txt");
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  CHECK(text.rfind("0 ", 0) == 0);
}

TEST_CASE("slices are bounds-checked") {
  EmbeddingMatrix m(5, 2);
  CHECK(m.slice(2, 3).rows == 3);
  CHECK_THROWS_AS(m.slice(4, 2), BoundsError);
}

TEST_CASE("train config defaults, validation and decay") {
  TrainConfig cfg;
  CHECK(cfg.dim == 128);
  CHECK(cfg.negatives == 5);
  CHECK(cfg.learning_rate == 0.025);
  CHECK(cfg.rate_for_epoch(7) == 0.025);
  cfg.lr_decay = true;
  cfg.epochs = 3;
  CHECK(cfg.rate_for_epoch(0) == doctest::Approx(0.025));
  CHECK(cfg.rate_for_epoch(1) == doctest::Approx(0.01375));
  CHECK(cfg.rate_for_epoch(2) == doctest::Approx(0.0025));
  cfg.learning_rate = 0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}
