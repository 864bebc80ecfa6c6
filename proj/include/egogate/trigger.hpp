#pragma once

#include <variant>
#include <vector>

namespace egogate {

struct TraceSample {
  double start_sec = 0.0;
  double p = 0.0;  // P(C1 | window)
};

/// Classifier output feed: one probability per window start, evenly
/// spaced hop_sec apart.
struct ProbabilityTrace {
  std::vector<TraceSample> samples;
  double hop_sec = 0.0;
};

/// A [start, stop) period during which capture is ON. Output lists are
/// sorted, disjoint, and merged (no touching neighbors).
struct ActivationInterval {
  double start_sec = 0.0;
  double stop_sec = 0.0;
};

/// Re-arm capture for a fixed hold after every window at or above the
/// threshold.
struct FixedOffTrigger {
  double threshold = 0.4;
  double hold_sec = 1.0;
};

/// Two-threshold state machine: arm at on_threshold, release below
/// off_threshold (on_threshold > off_threshold).
struct HysteresisTrigger {
  double on_threshold = 0.8;
  double off_threshold = 0.7;
};

using TriggerConfig = std::variant<FixedOffTrigger, HysteresisTrigger>;

/// Union of [t, t + hold_sec] spans over every sample with p >= threshold.
std::vector<ActivationInterval> run_fixed_trigger(const ProbabilityTrace& trace, double threshold,
                                                  double hold_sec);

/// OFF->ON at p >= on_threshold, ON->OFF at p < off_threshold, hold
/// otherwise; starts OFF. An interval opens at the arming sample's time
/// and closes at the releasing sample's time; a trailing ON closes one
/// hop after the last sample.
std::vector<ActivationInterval> run_hysteresis(const ProbabilityTrace& trace, double on_threshold,
                                               double off_threshold);

std::vector<ActivationInterval> run_trigger(const ProbabilityTrace& trace,
                                            const TriggerConfig& config);

/// Sorts and coalesces overlapping-or-touching intervals. Rejects
/// intervals with stop <= start.
std::vector<ActivationInterval> merge_intervals(std::vector<ActivationInterval> intervals);

/// Sum of interval lengths.
double total_active_sec(const std::vector<ActivationInterval>& intervals);

}  // namespace egogate
