#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nebed/comm.hpp"
#include "nebed/evaluator.hpp"
#include "nebed/graph.hpp"
#include "nebed/partition.hpp"
#include "nebed/train_block.hpp"
#include "nebed/walker.hpp"

namespace nebed::cli {

struct GraphSection {
  std::string path;
  EdgeFormat format = EdgeFormat::kText;
  unsigned id_width = 4;
  bool symmetrize = true;

  friend bool operator==(const GraphSection&, const GraphSection&) = default;
};

struct EvalSection {
  double test_frac = 0.01;
  double valid_frac = 0.0001;
  std::uint64_t seed = 1;
  ScoreMode mode = ScoreMode::kVertexContext;

  friend bool operator==(const EvalSection&, const EvalSection&) = default;
};

struct EstimateSection {
  double nodes = 0;         // 0: take from the graph
  double edges = 0;         // 0: take from the graph
  double augmentation = 0;  // 0: walk.k * walk.l
  double compute_rate = 1e12;

  friend bool operator==(const EstimateSection&, const EstimateSection&) = default;
};

/// Everything a run needs. Serialized as flat "section.key=value" lines.
struct RunConfig {
  GraphSection graph;
  std::string output_dir = "out";
  TrainConfig train;
  bool prefetch = true;
  bool write_timeline = false;
  WalkConfig walk;
  std::size_t walk_epochs = 0;  // distinct walk corpora; 0 means one per training epoch
  ClusterShape shape;
  EvalSection eval;
  EstimateSection estimate;
  BandwidthProfile channels;
  double channel_jitter = 0.0;

  /// Checks every field against the owning module's domain; throws ConfigError.
  void validate() const;
  std::size_t corpus_epochs() const noexcept { return walk_epochs == 0 ? train.epochs : walk_epochs; }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Every accepted key, in serialization order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws ConfigError for an unknown key or bad value.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& cfg, std::string_view key);

/// "key=value" per line; '#' comments and blank lines are ignored.
RunConfig parse_config(std::string_view text);
std::string to_text(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace nebed::cli
