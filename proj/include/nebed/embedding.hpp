#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nebed/types.hpp"

namespace nebed {

/// A contiguous run of embedding rows addressed by global node id.
struct RowBlock {
  NodeId first = 0;
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::span<float> values;

  bool contains(NodeId id) const noexcept { return id >= first && id - first < rows; }
  NodeId end() const noexcept { return first + rows; }
  std::span<float> row(NodeId id) const noexcept {
    return values.subspan((id - first) * dim, dim);
  }
};

/// Dense row-major single-precision matrix.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), values_(rows * dim) {}

  /// Vertex initialization: every entry uniform in (-0.5/d, +0.5/d).
  static EmbeddingMatrix uniform_init(std::size_t rows, std::size_t dim, std::uint64_t seed);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }

  std::span<float> row(NodeId id) noexcept { return {values_.data() + id * dim_, dim_}; }
  std::span<const float> row(NodeId id) const noexcept {
    return {values_.data() + id * dim_, dim_};
  }

  /// Rows [first, first + count) as a writable view. Throws BoundsError.
  RowBlock slice(NodeId first, std::size_t count);

  bool all_finite() const noexcept;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

/// "id v1 ... vd" per line, shortest round-trip float formatting.
void save_embeddings_text(const std::filesystem::path& path, const EmbeddingMatrix& m);

}  // namespace nebed
