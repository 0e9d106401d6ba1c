#pragma once

#include <cstdint>

namespace nebed {

using NodeId = std::uint64_t;

// A directed positive sample (vertex row, context row).
struct Sample {
  NodeId src = 0;
  NodeId dst = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
  friend auto operator<=>(const Sample&, const Sample&) = default;
};

}  // namespace nebed

namespace nebed {

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

}  // namespace nebed
