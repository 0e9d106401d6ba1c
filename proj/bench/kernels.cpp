// OpenMP kernels against their single-threaded references, and the threaded
// runtime against the sequential replay of the same episode.

#include <benchmark/benchmark.h>

#include "nebed/evaluator.hpp"
#include "nebed/generators.hpp"
#include "nebed/reference.hpp"
#include "nebed/runtime.hpp"

using namespace nebed;

namespace {

const Graph& bench_graph() {
  static const Graph g = Graph::from_edges(50000, random_edges(50000, 250000, 3), true);
  return g;
}

WalkConfig bench_walks() {
  WalkConfig cfg;
  cfg.walk_distance = 10;
  cfg.context_length = 5;
  return cfg;
}

void BM_WalkParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_samples(bench_graph(), bench_walks(), 0));
  }
}

void BM_WalkSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_samples_serial(bench_graph(), bench_walks(), 0));
  }
}

struct ScoreInputs {
  std::vector<Edge> pairs = random_edges(50000, 200000, 9);
  EmbeddingMatrix vertex = EmbeddingMatrix::uniform_init(50000, 128, 1);
  EmbeddingMatrix context = EmbeddingMatrix::uniform_init(50000, 128, 2);
};

const ScoreInputs& score_inputs() {
  static const ScoreInputs in;
  return in;
}

void BM_ScoreParallel(benchmark::State& state) {
  const auto& in = score_inputs();
  for (auto _ : state) benchmark::DoNotOptimize(score_pairs(in.pairs, in.vertex, in.context));
}

void BM_ScoreSerial(benchmark::State& state) {
  const auto& in = score_inputs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_pairs_serial(in.pairs, in.vertex, in.context));
  }
}

// Arguments: num_nodes, workers_per_node.
struct EpisodeInputs {
  ClusterShape shape;
  PartitionLayout layout;
  EpisodeSamples samples;
  std::vector<std::uint64_t> degrees;

  explicit EpisodeInputs(const ClusterShape& s)
      : shape(s),
        layout(PartitionLayout::for_shape(bench_graph().node_count(), s)),
        samples(EpisodeSamples::bucket(
            assign_episodes(bench_graph(), bench_walks(), 0,
                            generate_samples(bench_graph(), bench_walks(), 0))
                .front(),
            layout)),
        degrees(bench_graph().out_degrees()) {}
};

TrainConfig bench_train() {
  TrainConfig cfg;
  cfg.dim = 64;
  return cfg;
}

void BM_EpisodeRuntime(benchmark::State& state) {
  const EpisodeInputs in(ClusterShape{static_cast<std::size_t>(state.range(0)),
                                      static_cast<std::size_t>(state.range(1)), 4, 1});
  Runtime rt(build_schedule(in.shape), in.layout, in.degrees, bench_train());
  auto v = EmbeddingMatrix::uniform_init(bench_graph().node_count(), 64, 1);
  EmbeddingMatrix c(bench_graph().node_count(), 64);
  for (auto _ : state) benchmark::DoNotOptimize(rt.run_episode(in.samples, v, c, 0, 0));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * in.samples.total()));
}

void BM_EpisodeReplay(benchmark::State& state) {
  const EpisodeInputs in(ClusterShape{static_cast<std::size_t>(state.range(0)),
                                      static_cast<std::size_t>(state.range(1)), 4, 1});
  const auto plan = build_schedule(in.shape);
  auto v = EmbeddingMatrix::uniform_init(bench_graph().node_count(), 64, 1);
  EmbeddingMatrix c(bench_graph().node_count(), 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        replay_sequential(plan, in.layout, in.degrees, bench_train(), 1, in.samples, v, c, 0, 0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * in.samples.total()));
}

}  // namespace

BENCHMARK(BM_WalkParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WalkSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EpisodeRuntime)->Args({1, 2})->Args({2, 2})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EpisodeReplay)->Args({1, 2})->Args({2, 2})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
