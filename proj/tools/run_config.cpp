#include "run_config.hpp"

#include <charconv>
#include <functional>
#include <limits>
#include <map>

#include "nebed/binary_io.hpp"
#include "nebed/errors.hpp"

namespace nebed::cli {
namespace {

std::string format_double(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got \"" + std::string(s) + "\"");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got \"" +
                      std::string(s) + "\"");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got \"" + std::string(s) + "\"");
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view key, std::string_view)> set;
};

// Builders for the common field shapes, addressed through accessor lambdas.
template <typename Ref>
Field size_field(Ref ref) {
  return {[ref](const RunConfig& c) { return std::to_string(ref(c)); },
          [ref](RunConfig& c, std::string_view k, std::string_view v) {
            ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(parse_uint(k, v));
          }};
}

template <typename Ref>
Field double_field(Ref ref) {
  return {[ref](const RunConfig& c) { return format_double(ref(c)); },
          [ref](RunConfig& c, std::string_view k, std::string_view v) { ref(c) = parse_double(k, v); }};
}

template <typename Ref>
Field bool_field(Ref ref) {
  return {[ref](const RunConfig& c) { return std::string(ref(c) ? "true" : "false"); },
          [ref](RunConfig& c, std::string_view k, std::string_view v) { ref(c) = parse_bool(k, v); }};
}

void add_link(std::vector<std::pair<std::string, Field>>& fields, const std::string& name,
              LinkSpec BandwidthProfile::*link) {
  fields.emplace_back("channel." + name + ".bandwidth",
                      double_field([link](auto& c) -> auto& { return (c.channels.*link).bandwidth; }));
  fields.emplace_back("channel." + name + ".latency",
                      double_field([link](auto& c) -> auto& { return (c.channels.*link).latency; }));
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const auto table = [] {
    std::vector<std::pair<std::string, Field>> f;
    f.emplace_back("graph.path", Field{[](const RunConfig& c) { return c.graph.path; },
                                       [](RunConfig& c, std::string_view, std::string_view v) {
                                         c.graph.path = std::string(v);
                                       }});
    f.emplace_back("graph.format",
                   Field{[](const RunConfig& c) {
                           return std::string(c.graph.format == EdgeFormat::kText ? "text" : "binary");
                         },
                         [](RunConfig& c, std::string_view k, std::string_view v) {
                           if (v == "text") {
                             c.graph.format = EdgeFormat::kText;
                           } else if (v == "binary") {
                             c.graph.format = EdgeFormat::kBinary;
                           } else {
                             throw ConfigError(std::string(k) + ": expected text or binary");
                           }
                         }});
    f.emplace_back("graph.id_width", size_field([](auto& c) -> auto& { return c.graph.id_width; }));
    f.emplace_back("graph.symmetrize", bool_field([](auto& c) -> auto& { return c.graph.symmetrize; }));
    f.emplace_back("output.dir", Field{[](const RunConfig& c) { return c.output_dir; },
                                       [](RunConfig& c, std::string_view, std::string_view v) {
                                         c.output_dir = std::string(v);
                                       }});

    f.emplace_back("train.dim", size_field([](auto& c) -> auto& { return c.train.dim; }));
    f.emplace_back("train.negatives", size_field([](auto& c) -> auto& { return c.train.negatives; }));
    f.emplace_back("train.learning_rate", double_field([](auto& c) -> auto& { return c.train.learning_rate; }));
    f.emplace_back("train.lr_decay", bool_field([](auto& c) -> auto& { return c.train.lr_decay; }));
    f.emplace_back("train.epochs", size_field([](auto& c) -> auto& { return c.train.epochs; }));
    f.emplace_back("train.seed", size_field([](auto& c) -> auto& { return c.train.seed; }));
    f.emplace_back("train.deterministic", bool_field([](auto& c) -> auto& { return c.train.deterministic; }));
    f.emplace_back("train.prefetch", bool_field([](auto& c) -> auto& { return c.prefetch; }));
    f.emplace_back("train.timeline", bool_field([](auto& c) -> auto& { return c.write_timeline; }));

    f.emplace_back("walk.k", size_field([](auto& c) -> auto& { return c.walk.walk_distance; }));
    f.emplace_back("walk.l", size_field([](auto& c) -> auto& { return c.walk.context_length; }));
    f.emplace_back("walk.walks_per_node", size_field([](auto& c) -> auto& { return c.walk.walks_per_node; }));
    f.emplace_back("walk.seed", size_field([](auto& c) -> auto& { return c.walk.seed; }));
    f.emplace_back("walk.episodes_per_epoch", size_field([](auto& c) -> auto& { return c.walk.episodes_per_epoch; }));
    f.emplace_back("walk.degree_guided", bool_field([](auto& c) -> auto& { return c.walk.degree_guided; }));
    f.emplace_back("walk.epochs", size_field([](auto& c) -> auto& { return c.walk_epochs; }));

    f.emplace_back("shape.num_nodes", size_field([](auto& c) -> auto& { return c.shape.num_nodes; }));
    f.emplace_back("shape.workers_per_node", size_field([](auto& c) -> auto& { return c.shape.workers_per_node; }));
    f.emplace_back("shape.subparts", size_field([](auto& c) -> auto& { return c.shape.subparts; }));
    f.emplace_back("shape.sockets_per_node", size_field([](auto& c) -> auto& { return c.shape.sockets_per_node; }));

    f.emplace_back("eval.test_frac", double_field([](auto& c) -> auto& { return c.eval.test_frac; }));
    f.emplace_back("eval.valid_frac", double_field([](auto& c) -> auto& { return c.eval.valid_frac; }));
    f.emplace_back("eval.seed", size_field([](auto& c) -> auto& { return c.eval.seed; }));
    f.emplace_back("eval.mode", Field{[](const RunConfig& c) { return std::string(to_string(c.eval.mode)); },
                                      [](RunConfig& c, std::string_view k, std::string_view v) {
                                        try {
                                          c.eval.mode = parse_score_mode(v);
                                        } catch (const ArgumentError& e) {
                                          throw ConfigError(std::string(k) + ": " + e.what());
                                        }
                                      }});

    f.emplace_back("estimate.nodes", double_field([](auto& c) -> auto& { return c.estimate.nodes; }));
    f.emplace_back("estimate.edges", double_field([](auto& c) -> auto& { return c.estimate.edges; }));
    f.emplace_back("estimate.augmentation", double_field([](auto& c) -> auto& { return c.estimate.augmentation; }));
    f.emplace_back("estimate.compute_rate", double_field([](auto& c) -> auto& { return c.estimate.compute_rate; }));

    add_link(f, "intra_p2p", &BandwidthProfile::intra_p2p);
    add_link(f, "cross_socket", &BandwidthProfile::cross_socket);
    add_link(f, "host_staging", &BandwidthProfile::host_staging);
    add_link(f, "inter_node", &BandwidthProfile::inter_node);
    f.emplace_back("channel.cross_socket_penalty",
                   double_field([](auto& c) -> auto& { return c.channels.cross_socket_penalty; }));
    f.emplace_back("channel.jitter", double_field([](auto& c) -> auto& { return c.channel_jitter; }));
    return f;
  }();
  return table;
}

const Field& field(std::string_view key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw ConfigError("unknown key \"" + std::string(key) + "\"");
}

}  // namespace

void RunConfig::validate() const {
  auto wrap = [](auto&& check) {
    try {
      check();
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  };
  wrap([&] { train.validate(); });
  wrap([&] { walk.validate(); });
  wrap([&] { shape.validate(); });
  wrap([&] { channels.validate(); });
  if (graph.id_width != 4 && graph.id_width != 8) throw ConfigError("graph.id_width must be 4 or 8");
  if (!(eval.test_frac >= 0 && eval.test_frac < 1 && eval.valid_frac >= 0 && eval.valid_frac < 1 &&
        eval.test_frac + eval.valid_frac < 1)) {
    throw ConfigError("eval fractions must lie in [0, 1) and sum to less than 1");
  }
  if (!(channel_jitter >= 0)) throw ConfigError("channel.jitter must be non-negative");
  if (estimate.nodes < 0 || estimate.edges < 0 || estimate.augmentation < 0 ||
      !(estimate.compute_rate > 0)) {
    throw ConfigError("estimate counts must be non-negative and the compute rate positive");
  }
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

const std::vector<std::string>& config_keys() {
  static const auto keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  field(key).set(cfg, key, value);
}

std::string get_config_value(const RunConfig& cfg, std::string_view key) {
  return field(key).get(cfg);
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    auto key = line.substr(0, eq);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
    auto value = line.substr(eq + 1);
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.remove_prefix(1);
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

std::string to_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + "=" + f.get(cfg) + "\n";
  return out;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path));
}

}  // namespace nebed::cli
