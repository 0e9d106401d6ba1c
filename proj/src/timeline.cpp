#include "nebed/timeline.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "nebed/errors.hpp"

namespace nebed {

StageTimeline::StageTimeline(const StageTimeline& other) : origin_(other.origin_) {
  std::lock_guard lock(other.mu_);
  events_ = other.events_;
}

StageTimeline& StageTimeline::operator=(const StageTimeline& other) {
  if (this == &other) return *this;
  auto copy = other.events();
  std::lock_guard lock(mu_);
  origin_ = other.origin_;
  events_ = std::move(copy);
  return *this;
}

void StageTimeline::record(int worker, Stage stage, long subpart, Clock::time_point start,
                           Clock::time_point end) {
  StageEvent e{worker, stage, subpart, to_ns(start), to_ns(end)};
  std::lock_guard lock(mu_);
  events_.push_back(e);
}

void StageTimeline::append(const StageTimeline& other) {
  const auto shift = std::chrono::duration_cast<std::chrono::nanoseconds>(
                         other.origin_ - origin_).count();
  auto incoming = other.events();
  std::lock_guard lock(mu_);
  for (auto e : incoming) {
    e.start_ns += shift;
    e.end_ns += shift;
    events_.push_back(e);
  }
}

std::vector<StageEvent> StageTimeline::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::string StageTimeline::to_text() const {
  std::ostringstream out;
  for (const auto& e : events()) {
    out << e.worker << ' ' << static_cast<int>(e.stage) << ' ' << e.subpart << ' ' << e.start_ns
        << ' ' << e.end_ns << "\n";
  }
  return out.str();
}

StageTimeline StageTimeline::parse(std::string_view text) {
  StageTimeline t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    StageEvent e;
    int stage = 0;
    if (!(row >> e.worker >> stage >> e.subpart >> e.start_ns >> e.end_ns)) {
      throw ParseError(line_no, "bad timeline row");
    }
    e.stage = static_cast<Stage>(stage);
    t.events_.push_back(e);
  }
  return t;
}

std::string validate_timeline(const std::vector<StageEvent>& events) {
  std::map<int, std::vector<std::pair<std::int64_t, std::int64_t>>> train;
  for (const auto& e : events) {
    const int s = static_cast<int>(e.stage);
    if (s < 1 || s > 7) return "event with stage " + std::to_string(s);
    if (e.end_ns < e.start_ns) return "event ends before it starts";
    if (e.stage == Stage::kTrain) train[e.worker].emplace_back(e.start_ns, e.end_ns);
  }
  for (auto& [worker, spans] : train) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first < spans[i - 1].second) {
        return "overlapping train intervals on worker " + std::to_string(worker);
      }
    }
  }
  return {};
}

namespace {

std::vector<std::pair<std::int64_t, std::int64_t>> merged_training(
    const std::vector<StageEvent>& events) {
  std::vector<std::pair<std::int64_t, std::int64_t>> spans;
  for (const auto& e : events) {
    if (e.stage == Stage::kTrain) spans.emplace_back(e.start_ns, e.end_ns);
  }
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, s.second);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

std::int64_t covered(const std::vector<std::pair<std::int64_t, std::int64_t>>& merged,
                     std::int64_t a, std::int64_t b) {
  std::int64_t sum = 0;
  for (const auto& [s, e] : merged) {
    const auto lo = std::max(a, s), hi = std::min(b, e);
    if (hi > lo) sum += hi - lo;
  }
  return sum;
}

}  // namespace

std::int64_t overlap_with_training_ns(const std::vector<StageEvent>& events, Stage stage) {
  const auto merged = merged_training(events);
  std::int64_t sum = 0;
  for (const auto& e : events) {
    if (e.stage == stage) sum += covered(merged, e.start_ns, e.end_ns);
  }
  return sum;
}

std::int64_t total_ns(const std::vector<StageEvent>& events, Stage stage) {
  std::int64_t sum = 0;
  for (const auto& e : events) {
    if (e.stage == stage) sum += e.end_ns - e.start_ns;
  }
  return sum;
}

bool every_event_overlaps_training(const std::vector<StageEvent>& events, Stage stage) {
  const auto merged = merged_training(events);
  for (const auto& e : events) {
    if (e.stage != stage) continue;
    const bool hit = std::any_of(merged.begin(), merged.end(), [&](const auto& m) {
      return std::max(m.first, e.start_ns) < std::min(m.second, e.end_ns);
    });
    if (!hit) return false;
  }
  return true;
}

}  // namespace nebed
