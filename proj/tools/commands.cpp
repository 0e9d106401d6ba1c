#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <future>
#include <sstream>

#include "nebed/binary_io.hpp"
#include "nebed/episode_store.hpp"
#include "nebed/perfmodel.hpp"
#include "nebed/runtime.hpp"
#include "nebed/scheduler.hpp"

namespace nebed::cli {
namespace {

constexpr std::uint64_t kVertexInitStream = 0x56494e4954ULL;

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void require_graph(const RunConfig& cfg) {
  if (cfg.graph.path.empty()) throw UsageError("graph.path is required");
}

PartitionLayout layout_for(const RunConfig& cfg, const Graph& g) {
  return PartitionLayout::for_shape(g.node_count(), cfg.shape);
}

void walk_epoch(const RunConfig& cfg, const Graph& train, const PartitionLayout& layout,
                std::size_t epoch) {
  spdlog::info("walk: epoch {} starting", epoch);
  const auto m = run_walk_engine(train, cfg.walk, layout, walk_root(cfg), epoch, cfg.graph.id_width);
  spdlog::info("walk: epoch {} wrote {} samples in {} episodes", epoch, m.total(), m.episodes());
}

// Epoch number of every checkpoint directory, ascending.
std::vector<std::size_t> checkpoint_epochs(const RunConfig& cfg) {
  std::vector<std::size_t> epochs;
  const auto root = std::filesystem::path(cfg.output_dir) / "checkpoint";
  if (!std::filesystem::exists(root)) return epochs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("epoch_", 0) != 0) continue;
    std::size_t e = 0;
    const auto* first = name.data() + 6;
    const auto res = std::from_chars(first, name.data() + name.size(), e);
    if (res.ec == std::errc() && res.ptr == name.data() + name.size()) epochs.push_back(e);
  }
  std::sort(epochs.begin(), epochs.end());
  return epochs;
}

}  // namespace

std::filesystem::path walk_root(const RunConfig& cfg) {
  return std::filesystem::path(cfg.output_dir) / "walks";
}

std::filesystem::path checkpoint_dir(const RunConfig& cfg, std::size_t epoch) {
  return std::filesystem::path(cfg.output_dir) / "checkpoint" / ("epoch_" + std::to_string(epoch));
}

std::filesystem::path eval_report_path(const RunConfig& cfg) {
  return std::filesystem::path(cfg.output_dir) / "eval" / "report.txt";
}

Dataset load_dataset(const RunConfig& cfg) {
  cfg.validate();
  require_graph(cfg);
  Dataset d;
  d.full = load_edge_list(cfg.graph.path,
                          LoadOptions{cfg.graph.format, cfg.graph.id_width, cfg.graph.symmetrize});
  d.split = split_edges(d.full, cfg.eval.test_frac, cfg.eval.valid_frac, cfg.eval.seed);
  d.train = training_graph(d.split);
  spdlog::info("graph: {} nodes, {} edges; held out {} test and {} validation edges",
               d.full.node_count(), d.full.edge_count(), d.split.test.size(), d.split.valid.size());
  return d;
}

std::vector<std::filesystem::path> cmd_walk(const RunConfig& cfg, std::optional<std::size_t> epoch) {
  const auto data = load_dataset(cfg);
  const auto layout = layout_for(cfg, data.train);
  std::vector<std::size_t> epochs;
  if (epoch) {
    epochs.push_back(*epoch);
  } else {
    for (std::size_t e = 0; e < cfg.corpus_epochs(); ++e) epochs.push_back(e);
  }
  std::vector<std::filesystem::path> manifests;
  for (auto e : epochs) {
    walk_epoch(cfg, data.train, layout, e);
    manifests.push_back(epoch_dir(walk_root(cfg), e) / "MANIFEST");
  }
  return manifests;
}

std::filesystem::path cmd_train(const RunConfig& cfg, bool walk_ahead) {
  const auto data = load_dataset(cfg);
  const auto layout = layout_for(cfg, data.train);
  const auto degrees = data.train.out_degrees();
  RuntimeOptions options;
  options.channels = cfg.channels;
  options.max_jitter_seconds = cfg.channel_jitter;
  options.jitter_seed = cfg.train.seed;
  Runtime runtime(build_schedule(cfg.shape), layout, degrees, cfg.train, options);

  const auto n = data.train.node_count();
  auto vertex = EmbeddingMatrix::uniform_init(n, cfg.train.dim,
                                              derive_seed(cfg.train.seed, kVertexInitStream));
  EmbeddingMatrix context(n, cfg.train.dim);

  const std::size_t corpora = cfg.corpus_epochs();
  std::future<void> pending;
  if (walk_ahead) walk_epoch(cfg, data.train, layout, 0);

  std::filesystem::path last;
  for (std::size_t e = 0; e < cfg.train.epochs; ++e) {
    if (pending.valid()) pending.get();
    if (walk_ahead && e + 1 < corpora) {
      pending = std::async(std::launch::async,
                           [&, next = e + 1] { walk_epoch(cfg, data.train, layout, next); });
    }
    const std::size_t corpus = e % corpora;
    const auto store = EpisodeSampleStore::open(walk_root(cfg), corpus);
    const auto result = runtime.run_epoch(store, vertex, context, e, cfg.prefetch);
    if (!vertex.all_finite() || !context.all_finite()) {
      throw Error("numeric", "non-finite embedding values after epoch " + std::to_string(e));
    }

    last = checkpoint_dir(cfg, e);
    std::filesystem::create_directories(last);
    save_embeddings(last / "vertex.nebe", vertex);
    save_embeddings(last / "context.nebe", context);
    if (cfg.write_timeline) io::write_text(last / "timeline.txt", result.timeline.to_text());
    spdlog::info("train: epoch {} on corpus {}: {} samples, mean loss {:.5f}, {:.3f} s", e, corpus,
                 result.stats.samples, result.stats.mean_loss(), result.wall_seconds);
  }
  return last;
}

std::string cmd_eval(const RunConfig& cfg, std::optional<std::filesystem::path> checkpoint) {
  const auto data = load_dataset(cfg);
  if (data.split.test.empty()) throw UsageError("eval.test_frac is 0; there is nothing to score");

  std::vector<std::pair<std::string, std::filesystem::path>> targets;
  if (checkpoint) {
    targets.emplace_back(checkpoint->filename().string(), *checkpoint);
  } else {
    for (auto e : checkpoint_epochs(cfg)) {
      targets.emplace_back("epoch_" + std::to_string(e), checkpoint_dir(cfg, e));
    }
  }
  if (targets.empty()) throw UsageError("no checkpoints under " + cfg.output_dir);

  std::ostringstream out;
  out << "format=nebed-eval\n"
      << "graph.nodes=" << data.full.node_count() << "\n"
      << "graph.edges=" << data.full.edge_count() << "\n"
      << "split.units=" << (data.split.undirected ? "undirected" : "directed") << "\n"
      << "split.train=" << data.split.train.size() << "\n"
      << "split.test=" << data.split.test.size() << "\n"
      << "split.valid=" << data.split.valid.size() << "\n"
      << "split.test_negatives=" << data.split.test_negatives.size() << "\n"
      << "split.valid_negatives=" << data.split.valid_negatives.size() << "\n"
      << "score.mode=" << to_string(cfg.eval.mode) << "\n";
  for (const auto& [label, dir] : targets) {
    const auto vertex = load_embeddings(dir / "vertex.nebe");
    const auto context = load_embeddings(dir / "context.nebe");
    if (vertex.rows() != data.full.node_count()) {
      throw FormatError(dir.string() + ": checkpoint has " + std::to_string(vertex.rows()) +
                        " rows, graph has " + std::to_string(data.full.node_count()) + " nodes");
    }
    const auto r = evaluate(data.split, vertex, context, cfg.eval.mode);
    out << "result " << label << " test_auc=" << num(r.test_auc);
    if (r.has_valid) out << " valid_auc=" << num(r.valid_auc);
    out << "\n";
    spdlog::info("eval: {} test AUC {:.4f}", label, r.test_auc);
  }
  out << "[config]\n";
  for (const auto& key : config_keys()) {
    if (key == "output.dir") continue;  // keeps reports of identical runs identical
    out << key << "=" << get_config_value(cfg, key) << "\n";
  }
  const auto text = out.str();
  std::filesystem::create_directories(eval_report_path(cfg).parent_path());
  io::write_text(eval_report_path(cfg), text);
  return text;
}

std::string cmd_estimate(const RunConfig& cfg, bool machine_readable) {
  cfg.validate();
  CostInputs in;
  in.nodes = cfg.estimate.nodes;
  in.edges = cfg.estimate.edges;
  if ((in.nodes == 0 || in.edges == 0) && !cfg.graph.path.empty()) {
    const auto g = load_edge_list(cfg.graph.path, LoadOptions{cfg.graph.format, cfg.graph.id_width,
                                                              cfg.graph.symmetrize});
    if (in.nodes == 0) in.nodes = static_cast<double>(g.node_count());
    if (in.edges == 0) in.edges = static_cast<double>(g.edge_count());
  }
  in.augmentation = cfg.estimate.augmentation > 0
                        ? cfg.estimate.augmentation
                        : static_cast<double>(cfg.walk.walk_distance * cfg.walk.context_length);
  in.dim = cfg.train.dim;
  in.id_bytes = cfg.graph.id_width;
  in.real_bytes = 4;
  in.negatives = cfg.train.negatives;

  const auto mem = memory_cost(in);
  const auto ai = arithmetic_intensity(in);
  const auto tl = timeline_estimate(cfg.shape, in, cfg.channels, cfg.estimate.compute_rate);

  const std::vector<std::pair<std::string, double>> memory{
      {"nodes", mem.nodes},
      {"edges", mem.edges},
      {"augmented_edges", mem.augmented_edges},
      {"vertex_embeddings", mem.vertex_embeddings},
      {"context_embeddings", mem.context_embeddings},
      {"total", mem.total()}};
  const std::vector<std::pair<std::string, double>> timeline{
      {"step_compute", tl.step_compute},         {"sample_load", tl.sample_load},
      {"peer_exchange", tl.peer_exchange},       {"inter_node", tl.inter_node},
      {"inter_node_exposed", tl.inter_node_exposed}, {"stage_in_out", tl.stage_in_out},
      {"compute_total", tl.compute_total},       {"total", tl.total}};

  std::ostringstream out;
  if (machine_readable) {
    out << "input.nodes=" << num(in.nodes) << "\ninput.edges=" << num(in.edges)
        << "\ninput.augmentation=" << num(in.augmentation) << "\n";
    for (const auto& [k, v] : memory) {
      out << "memory." << k << ".bytes=" << num(v) << "\nmemory." << k << ".gib=" << num(v / kGiB)
          << "\n";
    }
    out << "intensity.flops_per_sample=" << num(ai.flops)
        << "\nintensity.bytes_per_sample=" << num(ai.bytes)
        << "\nintensity.flops_per_byte=" << num(ai.intensity) << "\n";
    out << "timeline.steps=" << tl.steps << "\ntimeline.intra_exchanges=" << tl.intra_exchanges
        << "\ntimeline.inter_boundaries=" << tl.inter_boundaries << "\n";
    for (const auto& [k, v] : timeline) out << "timeline." << k << ".seconds=" << num(v) << "\n";
    return out.str();
  }

  char line[160];
  out << "inputs: " << num(in.nodes) << " nodes, " << num(in.edges) << " edges, "
      << num(in.augmentation) << " samples per edge, d=" << in.dim << ", m=" << in.negatives
      << "\n\n";
  std::snprintf(line, sizeof(line), "%-20s %20s %14s %12s\n", "memory", "bytes", "GiB", "TiB");
  out << line;
  for (const auto& [k, v] : memory) {
    std::snprintf(line, sizeof(line), "%-20s %20.0f %14.2f %12.3f\n", k.c_str(), v, v / kGiB,
                  v / kTiB);
    out << line;
  }
  out << "\n";
  std::snprintf(line, sizeof(line), "%-20s %14.1f flops %10.1f bytes %8.3f flops/byte\n",
                "per sample", ai.flops, ai.bytes, ai.intensity);
  out << line << "\n";
  std::snprintf(line, sizeof(line), "%-20s %14s   (%zu steps, %zu exchanges, %zu inter hops)\n",
                "episode timeline", "seconds", tl.steps, tl.intra_exchanges, tl.inter_boundaries);
  out << line;
  for (const auto& [k, v] : timeline) {
    std::snprintf(line, sizeof(line), "%-20s %14.6g\n", k.c_str(), v);
    out << line;
  }
  return out.str();
}

std::string cmd_run(const RunConfig& cfg) {
  cmd_train(cfg, true);
  if (cfg.eval.test_frac == 0.0) {
    spdlog::info("run: eval.test_frac is 0, skipping evaluation");
    return {};
  }
  return cmd_eval(cfg);
}

}  // namespace nebed::cli
