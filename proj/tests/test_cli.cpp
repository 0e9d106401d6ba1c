#include "doctest.h"

#include <spdlog/spdlog.h>

#include <cstdlib>

#include "commands.hpp"
#include "nebed/episode_store.hpp"
#include "nebed/generators.hpp"
#include "test_util.hpp"

using namespace nebed;
using namespace nebed::cli;
using nebed::testing::file_bytes;
using nebed::testing::TempDir;

namespace {

// Commands log at info; keep test output readable unless asked otherwise.
const bool kQuiet = [] {
  if (!std::getenv("NEBED_LOG_LEVEL")) spdlog::set_level(spdlog::level::warn);
  return true;
}();

RunConfig small_run(const TempDir& dir, const std::string& out) {
  const auto graph = dir / "graph.txt";
  if (!std::filesystem::exists(graph)) {
    save_edge_list(graph, community_edges(120, 4, 6, 1, 11), EdgeFormat::kText);
  }
  RunConfig cfg;
  cfg.graph.path = graph.string();
  cfg.output_dir = (dir / out).string();
  cfg.train.dim = 16;
  cfg.train.epochs = 3;
  cfg.walk.walk_distance = 6;
  cfg.walk.context_length = 3;
  cfg.walk.episodes_per_epoch = 2;
  cfg.walk_epochs = 2;
  cfg.shape = ClusterShape{2, 2, 2, 1};
  cfg.eval.test_frac = 0.1;
  cfg.eval.valid_frac = 0.05;
  return cfg;
}

}  // namespace

TEST_CASE("config text round-trips every key") {
  RunConfig cfg;
  cfg.graph.path = "some/graph.bin";
  cfg.graph.format = EdgeFormat::kBinary;
  cfg.graph.id_width = 8;
  cfg.train.dim = 64;
  cfg.train.learning_rate = 0.0125f;
  cfg.train.lr_decay = true;
  cfg.walk.degree_guided = true;
  cfg.walk_epochs = 3;
  cfg.shape = ClusterShape{3, 4, 2, 2};
  cfg.eval.valid_frac = 0.0;
  cfg.eval.mode = ScoreMode::kVertexVertex;
  cfg.estimate.compute_rate = 3.5e13;
  cfg.channels.inter_node.bandwidth = 12.5e9;
  cfg.channels.inter_node.latency = 2e-6;
  cfg.channel_jitter = 1e-4;
  const auto text = to_text(cfg);
  CHECK(parse_config(text) == cfg);
  CHECK(to_text(parse_config(text)) == text);
  CHECK(config_keys().size() == static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')));
}

TEST_CASE("config parser accepts comments and whitespace and rejects bad input") {
  const auto cfg = parse_config("# comment\n\n  train.dim = 32  \nwalk.k=3\n");
  CHECK(cfg.train.dim == 32);
  CHECK(cfg.walk.walk_distance == 3);
  CHECK_THROWS_AS(parse_config("nope=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train.dim\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train.dim=abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train.dim=-4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train.deterministic=maybe\n"), ConfigError);
  // Parsing leaves range checks to validate(), which runs after flag overrides.
  CHECK_THROWS_AS(parse_config("train.dim=0\n").validate(), ConfigError);
  CHECK_THROWS_AS(
      parse_config("shape.workers_per_node=3\nshape.sockets_per_node=4\n").validate(),
      ConfigError);
  try {
    parse_config("train.dim=8\nwalk.x=1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("walk on a triangle writes the enumerated sample count") {
  TempDir dir("cli_tri");
  const std::vector<Edge> tri{{0, 1}, {1, 2}, {2, 0}};
  save_edge_list(dir / "tri.txt", tri, EdgeFormat::kText);
  RunConfig cfg;
  cfg.graph.path = (dir / "tri.txt").string();
  cfg.output_dir = (dir / "out").string();
  cfg.eval.test_frac = 0.0;
  cfg.eval.valid_frac = 0.0;
  cfg.walk.walk_distance = 1;
  cfg.walk.context_length = 1;
  cfg.walk.walks_per_node = 2;
  const auto manifests = cmd_walk(cfg);
  REQUIRE(manifests.size() == 1);
  const auto store = EpisodeSampleStore::open(walk_root(cfg), 0);
  // One step per walk, one forward pair per step: 3 nodes x 2 walks.
  CHECK(store.manifest().total() == 6);
}

TEST_CASE("run produces checkpoints and an evaluation report") {
  TempDir dir("cli_run");
  const auto cfg = small_run(dir, "out");
  const auto report = cmd_run(cfg);
  for (std::size_t e = 0; e < cfg.train.epochs; ++e) {
    CHECK(std::filesystem::exists(checkpoint_dir(cfg, e) / "vertex.nebe"));
    CHECK(std::filesystem::exists(checkpoint_dir(cfg, e) / "context.nebe"));
  }
  CHECK(report.find("result epoch_2 test_auc=") != std::string::npos);
  CHECK(report.find("valid_auc=") != std::string::npos);
  CHECK(report.find("output.dir") == std::string::npos);
  CHECK(io::read_text(eval_report_path(cfg)) == report);
}

TEST_CASE("two deterministic runs are byte-identical") {
  TempDir dir("cli_det");
  const auto a = small_run(dir, "a");
  const auto b = small_run(dir, "b");
  CHECK(cmd_run(a) == cmd_run(b));
  for (std::size_t e = 0; e < a.train.epochs; ++e) {
    for (const char* f : {"vertex.nebe", "context.nebe"}) {
      CHECK(file_bytes(checkpoint_dir(a, e) / f) == file_bytes(checkpoint_dir(b, e) / f));
    }
  }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(walk_root(a))) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), walk_root(a));
    CHECK(file_bytes(entry.path()) == file_bytes(walk_root(b) / rel));
  }
}

TEST_CASE("train refuses a corpus written for a different layout") {
  TempDir dir("cli_hash");
  auto cfg = small_run(dir, "out");
  cmd_walk(cfg);
  cfg.shape = ClusterShape{1, 3, 2, 1};
  CHECK_THROWS_AS(cmd_train(cfg), ManifestError);
}

TEST_CASE("train without a corpus fails cleanly") {
  TempDir dir("cli_nocorpus");
  const auto cfg = small_run(dir, "out");
  CHECK_THROWS_AS(cmd_train(cfg), Error);
}

TEST_CASE("missing graph path is a usage error") {
  RunConfig cfg;
  CHECK_THROWS_AS(cmd_walk(cfg), UsageError);
}

TEST_CASE("estimate reports machine-readable keys") {
  RunConfig cfg;
  cfg.estimate.nodes = 1000;
  cfg.estimate.edges = 5000;
  cfg.estimate.augmentation = 2;
  const auto kv = cmd_estimate(cfg, true);
  CHECK(kv.find("memory.total.bytes=") != std::string::npos);
  CHECK(kv.find("intensity.flops_per_byte=0.75\n") != std::string::npos);
  CHECK(kv.find("timeline.total.seconds=") != std::string::npos);
  CHECK(cmd_estimate(cfg, false).find("flops/byte") != std::string::npos);
}
