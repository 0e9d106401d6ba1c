#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

namespace nebed {

// Pipeline stages of one training round:
//   1 load samples into the worker, 2 device->host of trained rows,
//   3 train, 4 intra-node peer exchange, 5 host->device stage-in,
//   6 inter-node transfer, 7 next-episode sample prefetch.
enum class Stage : int {
  kLoadSamples = 1,
  kStageOut = 2,
  kTrain = 3,
  kPeerExchange = 4,
  kStageIn = 5,
  kInterNode = 6,
  kPrefetch = 7,
};

// Worker id used for events of the sample-prefetch IO context.
inline constexpr int kIoContext = -1;

struct StageEvent {
  int worker = 0;
  Stage stage = Stage::kTrain;
  long subpart = -1;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
};

/// Thread-safe event log with timestamps relative to a shared origin.
class StageTimeline {
 public:
  using Clock = std::chrono::steady_clock;

  explicit StageTimeline(Clock::time_point origin = Clock::now()) : origin_(origin) {}
  StageTimeline(const StageTimeline& other);
  StageTimeline& operator=(const StageTimeline& other);

  std::int64_t to_ns(Clock::time_point t) const noexcept {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(t - origin_).count();
  }

  void record(int worker, Stage stage, long subpart, Clock::time_point start,
              Clock::time_point end);
  void append(const StageTimeline& other);

  std::vector<StageEvent> events() const;
  Clock::time_point origin() const noexcept { return origin_; }

  /// "worker stage subpart t_start_ns t_end_ns" per line.
  std::string to_text() const;
  static StageTimeline parse(std::string_view text);

 private:
  Clock::time_point origin_;
  mutable std::mutex mu_;
  std::vector<StageEvent> events_;
};

/// Structural checks: stages in 1..7, end >= start, and no two train (stage 3)
/// intervals of one worker overlap. Returns a description of the first
/// problem, or an empty string.
std::string validate_timeline(const std::vector<StageEvent>& events);

/// Total length of the part of `stage` intervals covered by any train interval.
std::int64_t overlap_with_training_ns(const std::vector<StageEvent>& events, Stage stage);
std::int64_t total_ns(const std::vector<StageEvent>& events, Stage stage);

/// True when every event of `stage` intersects at least one train interval.
bool every_event_overlaps_training(const std::vector<StageEvent>& events, Stage stage);

}  // namespace nebed
