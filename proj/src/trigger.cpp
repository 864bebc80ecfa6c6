#include "egogate/trigger.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace egogate {

namespace {

void check_trace(const ProbabilityTrace& trace) {
  if (trace.samples.empty()) {
    throw std::invalid_argument("empty probability trace");
  }
  for (const auto& s : trace.samples) {
    if (s.p < 0.0 || s.p > 1.0) {
      throw std::invalid_argument("trace probability outside [0, 1]");
    }
  }
  for (size_t i = 1; i < trace.samples.size(); ++i) {
    if (trace.samples[i].start_sec <= trace.samples[i - 1].start_sec) {
      throw std::invalid_argument("trace start times must be strictly increasing");
    }
  }
}

}  // namespace

std::vector<ActivationInterval> merge_intervals(std::vector<ActivationInterval> intervals) {
  for (const auto& iv : intervals) {
    if (iv.stop_sec <= iv.start_sec) {
      throw std::invalid_argument("interval with stop <= start");
    }
  }
  if (intervals.empty()) return intervals;
  std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) {
    return a.start_sec < b.start_sec || (a.start_sec == b.start_sec && a.stop_sec < b.stop_sec);
  });
  std::vector<ActivationInterval> merged;
  merged.push_back(intervals.front());
  for (size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].start_sec <= merged.back().stop_sec) {
      merged.back().stop_sec = std::max(merged.back().stop_sec, intervals[i].stop_sec);
    } else {
      merged.push_back(intervals[i]);
    }
  }
  return merged;
}

std::vector<ActivationInterval> run_fixed_trigger(const ProbabilityTrace& trace, double threshold,
                                                  double hold_sec) {
  check_trace(trace);
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  if (hold_sec <= 0.0) {
    throw std::invalid_argument("hold duration must be positive");
  }
  std::vector<ActivationInterval> spans;
  for (const auto& s : trace.samples) {
    if (s.p >= threshold) {
      spans.push_back({s.start_sec, s.start_sec + hold_sec});
    }
  }
  if (spans.empty()) return spans;
  return merge_intervals(std::move(spans));
}

std::vector<ActivationInterval> run_hysteresis(const ProbabilityTrace& trace, double on_threshold,
                                               double off_threshold) {
  check_trace(trace);
  if (!(on_threshold > off_threshold)) {
    throw std::invalid_argument("on threshold must exceed off threshold");
  }
  if (off_threshold <= 0.0 || on_threshold >= 1.0) {
    throw std::invalid_argument("hysteresis thresholds must lie in (0, 1)");
  }
  if (trace.hop_sec <= 0.0) {
    throw std::invalid_argument("trace hop must be positive");
  }

  std::vector<ActivationInterval> intervals;
  bool on = false;
  double opened_at = 0.0;
  for (const auto& s : trace.samples) {
    if (!on && s.p >= on_threshold) {
      on = true;
      opened_at = s.start_sec;
    } else if (on && s.p < off_threshold) {
      on = false;
      intervals.push_back({opened_at, s.start_sec});
    }
  }
  if (on) {
    intervals.push_back({opened_at, trace.samples.back().start_sec + trace.hop_sec});
  }
  return intervals;
}

std::vector<ActivationInterval> run_trigger(const ProbabilityTrace& trace,
                                            const TriggerConfig& config) {
  if (const auto* fixed = std::get_if<FixedOffTrigger>(&config)) {
    return run_fixed_trigger(trace, fixed->threshold, fixed->hold_sec);
  }
  const auto& hyst = std::get<HysteresisTrigger>(config);
  return run_hysteresis(trace, hyst.on_threshold, hyst.off_threshold);
}

double total_active_sec(const std::vector<ActivationInterval>& intervals) {
  double total = 0.0;
  for (const auto& iv : intervals) total += iv.stop_sec - iv.start_sec;
  return total;
}

}  // namespace egogate
