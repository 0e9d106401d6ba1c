#include "doctest.h"
#include "fixtures.hpp"
#include "nebed/errors.hpp"
#include "nebed/reference.hpp"
#include "nebed/runtime.hpp"
#include "test_util.hpp"

using namespace nebed;
using nebed::testing::make_episodes;
using nebed::testing::random_graph;
using nebed::testing::TempDir;

namespace {

TrainConfig small_train(std::size_t dim = 16) {
  TrainConfig cfg;
  cfg.dim = dim;
  cfg.seed = 5;
  return cfg;
}

struct Matrices {
  EmbeddingMatrix vertex;
  EmbeddingMatrix context;
};

Matrices fresh(NodeId n, std::size_t dim) {
  return {EmbeddingMatrix::uniform_init(n, dim, 11), EmbeddingMatrix(n, dim)};
}

// Runs one episode on the threaded runtime and on the sequential replay and
// reports whether the results are bitwise identical.
bool runtime_matches_replay(const Graph& g, const ClusterShape& shape, RuntimeOptions options = {}) {
  const auto layout = PartitionLayout::for_shape(g.node_count(), shape);
  WalkConfig wcfg;
  wcfg.walk_distance = 4;
  wcfg.context_length = 2;
  const auto episode = make_episodes(g, wcfg, layout).front();
  const auto degrees = g.out_degrees();
  const auto tcfg = small_train();

  Runtime rt(build_schedule(shape), layout, degrees, tcfg, options);
  auto a = fresh(g.node_count(), tcfg.dim);
  auto b = a;
  const auto result = rt.run_episode(episode, a.vertex, a.context, 0, 0);
  const auto stats = replay_sequential(rt.plan(), layout, degrees, tcfg, rt.effective_seed(),
                                       episode, b.vertex, b.context, 0, 0);
  CHECK(result.stats.samples == episode.total());
  CHECK(result.stats.loss_sum == stats.loss_sum);
  CHECK(validate_timeline(result.timeline.events()) == "");
  return a.vertex == b.vertex && a.context == b.context;
}

}  // namespace

TEST_CASE("a one-worker plan equals a plain pass of train_block") {
  const auto g = random_graph(200, 800, 1);
  const ClusterShape shape{1, 1, 1, 1};
  const auto layout = PartitionLayout::for_shape(200, shape);
  const auto episode = make_episodes(g, WalkConfig{}, layout).front();
  const auto tcfg = small_train();
  Runtime rt(build_schedule(shape), layout, g.out_degrees(), tcfg);
  auto a = fresh(200, tcfg.dim);
  auto b = a;
  rt.run_episode(episode, a.vertex, a.context, 0, 0);

  const auto degrees = g.out_degrees();
  const auto noise = NoiseTable::build(degrees, kNoisePower, 0);
  SplitMix64 rng(block_seed(tcfg.seed, 0, 0, 0, 0));
  train_block(episode.block(0, 0), b.vertex.slice(0, 200), b.context.slice(0, 200), noise,
              tcfg.negatives, static_cast<float>(tcfg.learning_rate), rng);
  CHECK(a.vertex == b.vertex);
  CHECK(a.context == b.context);
}

TEST_CASE("two workers with k = 2 match the sequential replay bitwise") {
  CHECK(runtime_matches_replay(random_graph(1000, 5000, 2), {1, 2, 2, 1}));
}

TEST_CASE("multi-node, multi-socket and jittered runs match the replay") {
  const auto g = random_graph(600, 3000, 3);
  CHECK(runtime_matches_replay(g, {2, 2, 2, 1}));
  CHECK(runtime_matches_replay(g, {2, 3, 1, 1}));
  CHECK(runtime_matches_replay(g, {1, 4, 2, 2}));
  CHECK(runtime_matches_replay(g, {3, 1, 3, 1}));

  RuntimeOptions jitter;
  jitter.max_jitter_seconds = 2e-4;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    jitter.jitter_seed = seed;
    CHECK(runtime_matches_replay(g, {2, 2, 3, 2}, jitter));
  }
}

TEST_CASE("more workers than nodes leaves empty ranges that still run") {
  CHECK(runtime_matches_replay(random_graph(5, 8, 4), {2, 2, 2, 1}));
}

TEST_CASE("inter-node transfers overlap training when latency is injected") {
  const auto g = random_graph(2000, 10000, 5);
  const ClusterShape shape{2, 1, 3, 1};
  const auto layout = PartitionLayout::for_shape(2000, shape);
  const auto episode = make_episodes(g, WalkConfig{}, layout).front();
  RuntimeOptions options;
  options.channels.inter_node.latency = 1e-3;
  Runtime rt(build_schedule(shape), layout, g.out_degrees(), small_train(), options);
  auto m = fresh(2000, 16);
  const auto result = rt.run_episode(episode, m.vertex, m.context, 0, 0);
  const auto events = result.timeline.events();
  CHECK(validate_timeline(events) == "");
  CHECK(total_ns(events, Stage::kInterNode) > 0);
  CHECK(every_event_overlaps_training(events, Stage::kInterNode));
  for (int s = 1; s <= 6; ++s) {
    if (s == 4) continue;  // no intra-node peers with G = 1
    CHECK(total_ns(events, static_cast<Stage>(s)) >= 0);
    bool present = false;
    for (const auto& e : events) present = present || e.stage == static_cast<Stage>(s);
    CHECK(present);
  }
}

TEST_CASE("run_epoch with prefetch equals episodes run back to back") {
  TempDir dir("rt");
  const auto g = random_graph(500, 2500, 6);
  const ClusterShape shape{1, 2, 2, 1};
  const auto layout = PartitionLayout::for_shape(500, shape);
  WalkConfig wcfg;
  wcfg.episodes_per_epoch = 3;
  const auto manifest = run_walk_engine(g, wcfg, layout, dir.path(), 0);
  const auto store = EpisodeSampleStore::open(dir.path(), 0);
  const auto tcfg = small_train();

  Runtime rt(build_schedule(shape), layout, g.out_degrees(), tcfg);
  auto a = fresh(500, tcfg.dim);
  auto b = a, c = a;
  const auto epoch = rt.run_epoch(store, a.vertex, a.context, 0, true);
  CHECK(epoch.stats.samples == manifest.total());
  CHECK(epoch.episode_seconds.size() == 3);
  CHECK(validate_timeline(epoch.timeline.events()) == "");
  std::size_t prefetches = 0;
  for (const auto& e : epoch.timeline.events()) {
    if (e.stage == Stage::kPrefetch) {
      ++prefetches;
      CHECK(e.worker == kIoContext);
    }
  }
  CHECK(prefetches == 3);

  rt.run_epoch(store, b.vertex, b.context, 0, false);
  for (std::size_t s = 0; s < 3; ++s) {
    rt.run_episode(store.load_episode(s), c.vertex, c.context, 0, s);
  }
  CHECK(a.vertex == b.vertex);
  CHECK(a.context == b.context);
  CHECK(a.vertex == c.vertex);
  CHECK(a.context == c.context);
}

TEST_CASE("a single-episode epoch is run_episode") {
  TempDir dir("rt");
  const auto g = random_graph(300, 1200, 7);
  const ClusterShape shape{2, 1, 2, 1};
  const auto layout = PartitionLayout::for_shape(300, shape);
  run_walk_engine(g, WalkConfig{}, layout, dir.path(), 0);
  const auto store = EpisodeSampleStore::open(dir.path(), 0);
  Runtime rt(build_schedule(shape), layout, g.out_degrees(), small_train());
  auto a = fresh(300, 16);
  auto b = a;
  rt.run_epoch(store, a.vertex, a.context, 0);
  rt.run_episode(store.load_episode(0), b.vertex, b.context, 0, 0);
  CHECK(a.vertex == b.vertex);
  CHECK(a.context == b.context);
}

TEST_CASE("a manifest written for another layout is refused") {
  TempDir dir("rt");
  const auto g = random_graph(300, 1200, 8);
  run_walk_engine(g, WalkConfig{}, PartitionLayout::for_shape(300, {1, 2, 2, 1}), dir.path(), 0);
  const auto store = EpisodeSampleStore::open(dir.path(), 0);
  const ClusterShape other{1, 2, 4, 1};
  Runtime rt(build_schedule(other), PartitionLayout::for_shape(300, other), g.out_degrees(),
             small_train());
  auto m = fresh(300, 16);
  CHECK_THROWS_AS(rt.run_epoch(store, m.vertex, m.context, 0), ManifestError);
  CHECK_THROWS_AS(EpisodeSampleStore::open(dir.path(), 1), ManifestError);
}

TEST_CASE("a misplaced sample aborts with the worker, step and rows") {
  const auto g = random_graph(400, 2000, 9);
  const ClusterShape shape{1, 2, 2, 1};
  const auto layout = PartitionLayout::for_shape(400, shape);
  auto episode = make_episodes(g, WalkConfig{}, layout).front();
  // Sub-part 3 holds rows [300, 400); plant a sample from row 0 in its block.
  episode.blocks[3 * 2 + 0].push_back({0, 0});
  Runtime rt(build_schedule(shape), layout, g.out_degrees(), small_train());
  auto m = fresh(400, 16);
  try {
    rt.run_episode(episode, m.vertex, m.context, 0, 0);
    FAIL("expected a schedule violation");
  } catch (const ScheduleViolation& e) {
    const std::string what = e.what();
    CHECK(what.find("worker 0") != std::string::npos);
    CHECK(what.find("step") != std::string::npos);
    CHECK(what.find("[300,400)") != std::string::npos);
  }
}

TEST_CASE("runtime input validation") {
  const auto g = random_graph(100, 300, 10);
  const ClusterShape shape{1, 2, 1, 1};
  const auto layout = PartitionLayout::for_shape(100, shape);
  const auto degrees = g.out_degrees();
  CHECK_THROWS_AS(Runtime(build_schedule({1, 2, 2, 1}), layout, degrees, small_train()),
                  ArgumentError);
  Runtime rt(build_schedule(shape), layout, degrees, small_train());
  auto wrong = fresh(100, 8);
  auto episode = make_episodes(g, WalkConfig{}, layout).front();
  CHECK_THROWS_AS(rt.run_episode(episode, wrong.vertex, wrong.context, 0, 0), ArgumentError);
  auto m = fresh(100, 16);
  episode.context_parts = 3;
  CHECK_THROWS_AS(rt.run_episode(episode, m.vertex, m.context, 0, 0), ManifestError);
}

TEST_CASE("non-deterministic mode draws its own seed and still trains") {
  const auto g = random_graph(300, 1500, 11);
  const ClusterShape shape{1, 2, 2, 1};
  const auto layout = PartitionLayout::for_shape(300, shape);
  const auto episode = make_episodes(g, WalkConfig{}, layout).front();
  auto cfg = small_train();
  cfg.deterministic = false;
  Runtime a(build_schedule(shape), layout, g.out_degrees(), cfg);
  Runtime b(build_schedule(shape), layout, g.out_degrees(), cfg);
  CHECK(a.effective_seed() != b.effective_seed());
  auto m = fresh(300, 16);
  const auto r = a.run_episode(episode, m.vertex, m.context, 0, 0);
  CHECK(r.stats.samples == episode.total());
  CHECK(m.vertex.all_finite());
}

TEST_CASE("timeline text round-trips and the validator catches overlap") {
  StageTimeline t;
  const auto o = t.origin();
  using std::chrono::nanoseconds;
  t.record(0, Stage::kTrain, 1, o + nanoseconds(10), o + nanoseconds(20));
  t.record(0, Stage::kTrain, 2, o + nanoseconds(20), o + nanoseconds(30));
  t.record(1, Stage::kInterNode, 2, o + nanoseconds(25), o + nanoseconds(40));
  t.record(kIoContext, Stage::kPrefetch, 0, o + nanoseconds(0), o + nanoseconds(50));
  const auto parsed = StageTimeline::parse(t.to_text());
  CHECK(parsed.to_text() == t.to_text());
  CHECK(t.to_text().find("1 6 2 25 40") != std::string::npos);
  auto events = t.events();
  CHECK(validate_timeline(events) == "");
  CHECK(overlap_with_training_ns(events, Stage::kInterNode) == 5);
  CHECK(every_event_overlaps_training(events, Stage::kInterNode));
  events.push_back({0, Stage::kTrain, 3, 15, 18});
  CHECK(validate_timeline(events) != "");
  events.back() = {0, static_cast<Stage>(8), 3, 15, 18};
  CHECK(validate_timeline(events) != "");
}
