#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nebed/errors.hpp"
#include "nebed/evaluator.hpp"
#include "nebed/graph.hpp"
#include "run_config.hpp"

namespace nebed::cli {

// Missing or contradictory command-line input; exits with status 2.
struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

std::filesystem::path walk_root(const RunConfig& cfg);
std::filesystem::path checkpoint_dir(const RunConfig& cfg, std::size_t epoch);
std::filesystem::path eval_report_path(const RunConfig& cfg);

/// The input graph, its held-out split and the training graph walks run on.
struct Dataset {
  Graph full;
  EvalSplit split;
  Graph train;
};

Dataset load_dataset(const RunConfig& cfg);

/// Writes walk corpora for `epoch`, or for every corpus epoch when unset.
/// Returns the manifest paths.
std::vector<std::filesystem::path> cmd_walk(const RunConfig& cfg,
                                            std::optional<std::size_t> epoch = std::nullopt);

/// Trains all epochs, writing a checkpoint after each. With `walk_ahead` the
/// corpus for epoch e + 1 is generated while epoch e trains; otherwise every
/// corpus must already be complete. Returns the last checkpoint directory.
std::filesystem::path cmd_train(const RunConfig& cfg, bool walk_ahead = false);

/// Link-prediction report over one checkpoint, or every epoch checkpoint in
/// order. The report is also written to eval_report_path().
std::string cmd_eval(const RunConfig& cfg,
                     std::optional<std::filesystem::path> checkpoint = std::nullopt);

/// Memory, intensity and timeline estimates as an aligned table, or as
/// key=value lines with `machine_readable`.
std::string cmd_estimate(const RunConfig& cfg, bool machine_readable = false);

/// Walk, train (walking one epoch ahead) and evaluate every checkpoint.
std::string cmd_run(const RunConfig& cfg);

}  // namespace nebed::cli
