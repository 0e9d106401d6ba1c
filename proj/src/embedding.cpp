#include "nebed/embedding.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "nebed/binary_io.hpp"
#include "nebed/errors.hpp"
#include "nebed/random.hpp"

namespace nebed {
namespace {

constexpr std::string_view kEmbeddingMagic = "NEBE";
constexpr std::uint8_t kEmbeddingVersion = 1;

}  // namespace

EmbeddingMatrix EmbeddingMatrix::uniform_init(std::size_t rows, std::size_t dim,
                                              std::uint64_t seed) {
  EmbeddingMatrix m(rows, dim);
  const double half = 0.5 / static_cast<double>(dim);
  SplitMix64 rng(derive_seed(seed, 0x494e4954ULL));
  for (auto& x : m.values_) x = static_cast<float>((rng.uniform() * 2.0 - 1.0) * half);
  return m;
}

RowBlock EmbeddingMatrix::slice(NodeId first, std::size_t count) {
  if (first > rows_ || count > rows_ - first) {
    throw BoundsError("row slice [" + std::to_string(first) + "," +
                      std::to_string(first + count) + ") outside " + std::to_string(rows_) +
                      " rows");
  }
  return RowBlock{first, count, dim_, std::span(values_).subspan(first * dim_, count * dim_)};
}

bool EmbeddingMatrix::all_finite() const noexcept {
  for (float x : values_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  io::ByteWriter out;
  out.bytes().reserve(24 + m.values().size() * 4);
  out.magic(kEmbeddingMagic);
  out.put<std::uint8_t>(kEmbeddingVersion);
  out.put<std::uint8_t>(4);
  out.put<std::uint16_t>(0);
  out.put<std::uint64_t>(m.rows());
  out.put<std::uint32_t>(static_cast<std::uint32_t>(m.dim()));
  out.put<std::uint32_t>(0);
  for (float x : m.values()) out.put(x);
  io::write_file(path, out.bytes());
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader in(bytes, path.string());
  in.expect_magic(kEmbeddingMagic);
  if (auto v = in.get<std::uint8_t>(); v != kEmbeddingVersion) {
    throw FormatError(path.string() + ": unsupported embedding version " + std::to_string(v));
  }
  if (auto w = in.get<std::uint8_t>(); w != 4) {
    throw FormatError(path.string() + ": float width " + std::to_string(w) + " unsupported");
  }
  in.get<std::uint16_t>();
  const auto rows = in.get<std::uint64_t>();
  const auto dim = in.get<std::uint32_t>();
  in.get<std::uint32_t>();
  if (dim == 0 && rows != 0) throw FormatError(path.string() + ": zero dimension");
  if (in.remaining() != rows * dim * 4) {
    throw FormatError(path.string() + ": payload does not match rows x dim");
  }
  EmbeddingMatrix m(rows, dim);
  for (auto& x : m.values()) x = in.get<float>();
  return m;
}

void save_embeddings_text(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  std::string text;
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    text += std::to_string(r);
    for (float x : m.row(r)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
      text += ' ';
      text.append(buf, ptr);
    }
    text += '\n';
  }
  io::write_text(path, text);
}

}  // namespace nebed
