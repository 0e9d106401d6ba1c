#include "nebed/graph.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <string>

#include "nebed/binary_io.hpp"
#include "nebed/errors.hpp"

namespace nebed {
namespace {

constexpr std::string_view kGraphMagic = "NEBG";
constexpr std::uint8_t kGraphVersion = 1;

std::uint64_t id_limit(unsigned id_width) {
  if (id_width == 4) return std::numeric_limits<std::uint32_t>::max();
  if (id_width == 8) return std::numeric_limits<std::uint64_t>::max();
  throw ArgumentError("id width must be 4 or 8, got " + std::to_string(id_width));
}

NodeId node_count_of(std::span<const Edge> edges) {
  NodeId max_id = 0;
  for (const auto& e : edges) max_id = std::max({max_id, e.src, e.dst});
  return edges.empty() ? 0 : max_id + 1;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace

Graph Graph::from_edges(NodeId node_count, std::span<const Edge> edges, bool symmetrize) {
  Graph g;
  g.symmetric_ = symmetrize;
  for (const auto& e : edges) {
    if (e.src >= node_count || e.dst >= node_count) {
      throw BoundsError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                        ") outside node range " + std::to_string(node_count));
    }
  }

  std::vector<Edge> scratch;
  std::span<const Edge> input = edges;
  if (symmetrize) {
    scratch.reserve(edges.size() * 2);
    for (const auto& e : edges) {
      scratch.push_back(e);
      if (e.src != e.dst) scratch.push_back({e.dst, e.src});
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    input = scratch;
  }

  // Counting sort by source; rows are sorted afterwards.
  g.offsets_.assign(node_count + 1, 0);
  for (const auto& e : input) ++g.offsets_[e.src + 1];
  for (NodeId u = 0; u < node_count; ++u) g.offsets_[u + 1] += g.offsets_[u];
  g.targets_.resize(input.size());
  std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : input) g.targets_[cursor[e.src]++] = e.dst;
  for (NodeId u = 0; u < node_count; ++u) {
    std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
              g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));
  }
  return g;
}

std::vector<std::uint64_t> Graph::out_degrees() const {
  std::vector<std::uint64_t> degrees(node_count());
  for (NodeId u = 0; u < node_count(); ++u) degrees[u] = out_degree(u);
  return degrees;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  if (u >= node_count()) return false;
  auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) out.push_back({u, v});
  }
  return out;
}

std::vector<Edge> parse_text_edges(std::string_view text, unsigned id_width) {
  const std::uint64_t limit = id_limit(id_width);
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    std::size_t i = 0;
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size() || line[i] == '#') continue;

    std::uint64_t ids[2];
    for (int k = 0; k < 2; ++k) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i == line.size()) throw ParseError(line_no, "expected two node ids");
      const char* first = line.data() + i;
      const char* last = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(first, last, ids[k]);
      if (ec == std::errc::result_out_of_range) {
        throw FormatError("line " + std::to_string(line_no) + ": id overflows " +
                          std::to_string(id_width * 8) + "-bit width");
      }
      if (ec != std::errc() || (ptr != last && !is_space(*ptr))) {
        throw ParseError(line_no, "malformed node id \"" + std::string(line.substr(i)) + "\"");
      }
      if (ids[k] > limit) {
        throw FormatError("line " + std::to_string(line_no) + ": id " + std::to_string(ids[k]) +
                          " overflows " + std::to_string(id_width * 8) + "-bit width");
      }
      i = static_cast<std::size_t>(ptr - line.data());
    }
    while (i < line.size() && is_space(line[i])) ++i;
    if (i != line.size()) throw ParseError(line_no, "trailing characters after edge");
    edges.push_back({ids[0], ids[1]});
  }
  return edges;
}

namespace {

std::vector<Edge> read_binary_edges(const std::filesystem::path& path, unsigned configured_width) {
  const std::uint64_t limit = id_limit(configured_width);
  const auto bytes = io::read_file(path);
  io::ByteReader in(bytes, path.string());
  in.expect_magic(kGraphMagic);
  const auto version = in.get<std::uint8_t>();
  if (version != kGraphVersion) {
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
  }
  const unsigned width = in.get<std::uint8_t>();
  if (width != 4 && width != 8) {
    throw FormatError(path.string() + ": id width " + std::to_string(width) + " not in {4,8}");
  }
  in.get<std::uint16_t>();
  const auto count = in.get<std::uint64_t>();
  if (in.remaining() / (2 * width) < count || in.remaining() != count * 2 * width) {
    throw FormatError(path.string() + ": payload size does not match edge count " +
                      std::to_string(count));
  }
  std::vector<Edge> edges(count);
  for (auto& e : edges) {
    e.src = in.get_id(width);
    e.dst = in.get_id(width);
    if (e.src > limit || e.dst > limit) {
      throw FormatError(path.string() + ": id overflows configured " +
                        std::to_string(configured_width * 8) + "-bit width");
    }
  }
  return edges;
}

}  // namespace

Graph load_edge_list(const std::filesystem::path& path, const LoadOptions& options) {
  std::vector<Edge> edges;
  if (options.format == EdgeFormat::kText) {
    const auto text = io::read_text(path);
    edges = parse_text_edges(text, options.id_width);
  } else {
    edges = read_binary_edges(path, options.id_width);
  }
  return Graph::from_edges(node_count_of(edges), edges, options.symmetrize);
}

void save_edge_list(const std::filesystem::path& path, std::span<const Edge> edges,
                    EdgeFormat format, unsigned id_width) {
  const std::uint64_t limit = id_limit(id_width);
  if (format == EdgeFormat::kText) {
    std::string text;
    text.reserve(edges.size() * 16);
    for (const auto& e : edges) {
      text += std::to_string(e.src);
      text += ' ';
      text += std::to_string(e.dst);
      text += '\n';
    }
    io::write_text(path, text);
    return;
  }
  io::ByteWriter out;
  out.magic(kGraphMagic);
  out.put<std::uint8_t>(kGraphVersion);
  out.put<std::uint8_t>(static_cast<std::uint8_t>(id_width));
  out.put<std::uint16_t>(0);
  out.put<std::uint64_t>(edges.size());
  for (const auto& e : edges) {
    if (e.src > limit || e.dst > limit) throw FormatError("id overflows id width on save");
    out.put_id(e.src, id_width);
    out.put_id(e.dst, id_width);
  }
  io::write_file(path, out.bytes());
}

}  // namespace nebed
