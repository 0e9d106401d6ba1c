#include "nebed/episode_store.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "nebed/binary_io.hpp"
#include "nebed/errors.hpp"

namespace nebed {
namespace {

constexpr std::string_view kBlockMagic = "NEBS";
constexpr std::uint8_t kBlockVersion = 1;
constexpr std::string_view kManifestFormat = "nebed-manifest";

std::uint64_t to_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ManifestError("bad value for " + std::string(what) + ": \"" + std::string(s) + "\"");
  }
  return v;
}

}  // namespace

std::uint64_t Manifest::episode_total(std::size_t episode) const {
  std::uint64_t sum = 0;
  for (auto c : counts.at(episode)) sum += c;
  return sum;
}

std::uint64_t Manifest::total() const {
  std::uint64_t sum = 0;
  for (std::size_t s = 0; s < counts.size(); ++s) sum += episode_total(s);
  return sum;
}

std::string Manifest::to_text() const {
  std::ostringstream out;
  out << "format=" << kManifestFormat << "\n"
      << "version=1\n"
      << "epoch=" << epoch << "\n"
      << "walk.k=" << walk.walk_distance << "\n"
      << "walk.l=" << walk.context_length << "\n"
      << "walk.walks_per_node=" << walk.walks_per_node << "\n"
      << "walk.seed=" << walk.seed << "\n"
      << "walk.episodes_per_epoch=" << walk.episodes_per_epoch << "\n"
      << "walk.degree_guided=" << (walk.degree_guided ? 1 : 0) << "\n"
      << "id_width=" << id_width << "\n"
      << "node_count=" << node_count << "\n"
      << "partition.vertex_parts=" << vertex_parts << "\n"
      << "partition.context_parts=" << context_parts << "\n"
      << "partition.hash=" << partition_hash << "\n"
      << "episodes=" << counts.size() << "\n"
      << "total=" << total() << "\n";
  for (std::size_t s = 0; s < counts.size(); ++s) {
    out << "[episode " << s << "]\n";
    for (std::size_t i = 0; i < vertex_parts; ++i) {
      for (std::size_t j = 0; j < context_parts; ++j) {
        out << i << ' ' << j << ' ' << counts[s][i * context_parts + j] << "\n";
      }
    }
  }
  return out.str();
}

Manifest Manifest::parse(std::string_view text) {
  Manifest m;
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  long current = -1;
  std::uint64_t declared_episodes = 0;
  bool header_done = false;
  auto parse_header = [&] {
    if (header_done) return;
    auto get = [&](std::string_view key) -> const std::string& {
      auto it = kv.find(key);
      if (it == kv.end()) throw ManifestError("missing key " + std::string(key));
      return it->second;
    };
    if (get("format") != kManifestFormat) throw ManifestError("not a manifest");
    m.epoch = to_u64(get("epoch"), "epoch");
    m.walk.walk_distance = to_u64(get("walk.k"), "walk.k");
    m.walk.context_length = to_u64(get("walk.l"), "walk.l");
    m.walk.walks_per_node = to_u64(get("walk.walks_per_node"), "walk.walks_per_node");
    m.walk.seed = to_u64(get("walk.seed"), "walk.seed");
    m.walk.episodes_per_epoch =
        to_u64(get("walk.episodes_per_epoch"), "walk.episodes_per_epoch");
    m.walk.degree_guided = to_u64(get("walk.degree_guided"), "walk.degree_guided") != 0;
    m.id_width = static_cast<unsigned>(to_u64(get("id_width"), "id_width"));
    m.node_count = to_u64(get("node_count"), "node_count");
    m.vertex_parts = to_u64(get("partition.vertex_parts"), "partition.vertex_parts");
    m.context_parts = to_u64(get("partition.context_parts"), "partition.context_parts");
    m.partition_hash = get("partition.hash");
    declared_episodes = to_u64(get("episodes"), "episodes");
    header_done = true;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      parse_header();
      unsigned long s = 0;
      if (std::sscanf(line.c_str(), "[episode %lu]", &s) != 1 ||
          s != m.counts.size()) {
        throw ManifestError("bad episode header \"" + line + "\"");
      }
      m.counts.emplace_back(m.vertex_parts * m.context_parts, 0);
      current = static_cast<long>(s);
      continue;
    }
    if (current < 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ManifestError("bad manifest line \"" + line + "\"");
      kv[line.substr(0, eq)] = line.substr(eq + 1);
      continue;
    }
    std::istringstream row(line);
    std::uint64_t i = 0, j = 0, c = 0;
    if (!(row >> i >> j >> c) || i >= m.vertex_parts || j >= m.context_parts) {
      throw ManifestError("bad block row \"" + line + "\"");
    }
    m.counts.back()[i * m.context_parts + j] = c;
  }
  if (kv.empty()) throw ManifestError("empty manifest");
  parse_header();
  if (m.counts.size() != declared_episodes) {
    throw ManifestError("manifest lists " + std::to_string(m.counts.size()) +
                        " episodes, header says " + std::to_string(declared_episodes));
  }
  if (auto it = kv.find("total"); it != kv.end() && to_u64(it->second, "total") != m.total()) {
    throw ManifestError("block counts sum to " + std::to_string(m.total()) + ", header says " +
                        it->second);
  }
  return m;
}

void write_block_file(const std::filesystem::path& path, std::span<const Sample> samples,
                      unsigned id_width, std::uint64_t seed) {
  const std::uint64_t limit = id_width == 4 ? 0xffffffffULL : ~0ULL;
  io::ByteWriter out;
  out.bytes().reserve(24 + samples.size() * 2 * id_width);
  out.magic(kBlockMagic);
  out.put<std::uint8_t>(kBlockVersion);
  out.put<std::uint8_t>(static_cast<std::uint8_t>(id_width));
  out.put<std::uint16_t>(0);
  out.put<std::uint64_t>(samples.size());
  out.put<std::uint64_t>(seed);
  for (const auto& s : samples) {
    if (s.src > limit || s.dst > limit) {
      throw FormatError(path.string() + ": sample id overflows id width");
    }
    out.put_id(s.src, id_width);
    out.put_id(s.dst, id_width);
  }
  io::write_file(path, out.bytes());
}

std::vector<Sample> read_block_file(const std::filesystem::path& path, BlockHeader* header) {
  const auto bytes = io::read_file(path);
  io::ByteReader in(bytes, path.string());
  in.expect_magic(kBlockMagic);
  if (auto v = in.get<std::uint8_t>(); v != kBlockVersion) {
    throw FormatError(path.string() + ": unsupported block version " + std::to_string(v));
  }
  BlockHeader h;
  h.id_width = in.get<std::uint8_t>();
  if (h.id_width != 4 && h.id_width != 8) throw FormatError(path.string() + ": bad id width");
  in.get<std::uint16_t>();
  h.sample_count = in.get<std::uint64_t>();
  h.seed = in.get<std::uint64_t>();
  if (in.remaining() != h.sample_count * 2 * h.id_width) {
    throw FormatError(path.string() + ": payload does not match sample count");
  }
  std::vector<Sample> samples(h.sample_count);
  for (auto& s : samples) {
    s.src = in.get_id(h.id_width);
    s.dst = in.get_id(h.id_width);
  }
  if (header) *header = h;
  return samples;
}

std::uint64_t EpisodeSamples::total() const {
  std::uint64_t sum = 0;
  for (const auto& b : blocks) sum += b.size();
  return sum;
}

EpisodeSamples EpisodeSamples::bucket(std::span<const Sample> samples,
                                      const PartitionLayout& layout) {
  EpisodeSamples out;
  out.vertex_parts = layout.vertex.size();
  out.context_parts = layout.context.size();
  out.blocks.resize(out.vertex_parts * out.context_parts);
  for (const auto& s : samples) {
    auto [i, j] = layout.block_of(s.src, s.dst);
    out.blocks[i * out.context_parts + j].push_back(s);
  }
  return out;
}

std::filesystem::path epoch_dir(const std::filesystem::path& root, std::uint64_t epoch) {
  return root / ("epoch_" + std::to_string(epoch));
}

std::filesystem::path block_path(const std::filesystem::path& root, std::uint64_t epoch,
                                 std::size_t episode, std::size_t i, std::size_t j) {
  return epoch_dir(root, epoch) / ("episode_" + std::to_string(episode)) /
         ("block_" + std::to_string(i) + "_" + std::to_string(j) + ".bin");
}

bool EpisodeSampleStore::complete(const std::filesystem::path& root, std::uint64_t epoch) {
  return std::filesystem::exists(epoch_dir(root, epoch) / "MANIFEST.done");
}

EpisodeSampleStore EpisodeSampleStore::open(const std::filesystem::path& root,
                                            std::uint64_t epoch) {
  const auto dir = epoch_dir(root, epoch);
  if (!std::filesystem::is_directory(dir)) {
    throw ManifestError("missing epoch directory " + dir.string());
  }
  if (!complete(root, epoch)) {
    throw ManifestError("epoch " + std::to_string(epoch) + " has no MANIFEST.done marker");
  }
  EpisodeSampleStore store;
  store.root_ = root;
  store.manifest_ = Manifest::parse(io::read_text(dir / "MANIFEST"));
  if (store.manifest_.epoch != epoch) {
    throw ManifestError("manifest in " + dir.string() + " is for epoch " +
                        std::to_string(store.manifest_.epoch));
  }
  return store;
}

EpisodeSamples EpisodeSampleStore::load_episode(std::size_t episode) const {
  if (episode >= manifest_.episodes()) {
    throw ManifestError("episode " + std::to_string(episode) + " not in manifest");
  }
  EpisodeSamples out;
  out.vertex_parts = manifest_.vertex_parts;
  out.context_parts = manifest_.context_parts;
  out.blocks.resize(out.vertex_parts * out.context_parts);
  for (std::size_t i = 0; i < out.vertex_parts; ++i) {
    for (std::size_t j = 0; j < out.context_parts; ++j) {
      const auto path = block_path(root_, manifest_.epoch, episode, i, j);
      if (!std::filesystem::exists(path)) {
        throw ManifestError("missing block (" + std::to_string(i) + "," + std::to_string(j) +
                            ") of episode " + std::to_string(episode) + ": " + path.string());
      }
      auto samples = read_block_file(path);
      if (samples.size() != manifest_.count(episode, i, j)) {
        throw ManifestError("block (" + std::to_string(i) + "," + std::to_string(j) +
                            ") holds " + std::to_string(samples.size()) +
                            " samples, manifest says " +
                            std::to_string(manifest_.count(episode, i, j)));
      }
      out.blocks[i * out.context_parts + j] = std::move(samples);
    }
  }
  return out;
}

}  // namespace nebed
