#pragma once

#include <string>
#include <vector>

#include "egogate/gating.hpp"
#include "egogate/metrics.hpp"
#include "egogate/power.hpp"
#include "egogate/trigger.hpp"

namespace egogate {

// One row of a label manifest: audio file path (relative to the manifest's
// directory unless absolute) and its interaction label.
struct LabeledClip {
  std::string clip_file;
  int label = 0;
};

// CSV with header "start_sec,p_c1", 6 decimal places per field.
void write_trace_csv(const std::string& path, const ProbabilityTrace& trace);
// Hop is recovered from consecutive start times; a single-row trace falls back
// to fallback_hop_sec.
ProbabilityTrace read_trace_csv(const std::string& path, double fallback_hop_sec = 2.0);

// JSON array of {"start_sec": s, "stop_sec": t}, sorted by start.
void write_intervals_json(const std::string& path,
                          const std::vector<ActivationInterval>& intervals);
std::vector<ActivationInterval> read_intervals_json(const std::string& path);

// JSON Lines, one {"clip_file": string, "is_hand_object_interaction": 0|1}
// object per line.
std::vector<LabeledClip> read_labels_jsonl(const std::string& path);
void write_labels_jsonl(const std::string& path, const std::vector<LabeledClip>& clips);

// {"fps": f, "duration_sec": d, "captured_intervals": [[a,b],...]} with
// captured spans in run-length form.
void write_plan_json(const std::string& path, const GatingPlan& plan);
GatingPlan read_plan_json(const std::string& path);

// GatingReport fields; percentages and bitrates rounded to 2 decimals,
// capture_fraction kept at full precision.
void write_report_json(const std::string& path, const GatingReport& report);

// JSON array of {"name", "active_power_w", "duty", "idle_power_w"?}.
std::vector<PowerComponent> read_power_config(const std::string& path);
void write_power_breakdown(const std::string& path, const PowerBreakdown& breakdown);

// CSV with header "tau,precision,recall,f1", 6 decimals.
void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points);

// CSV with header "p_c1,label": one classifier score and truth label per row.
struct ScoredExample {
  double p = 0.0;
  int label = 0;
};
std::vector<ScoredExample> read_scores_csv(const std::string& path);
void write_scores_csv(const std::string& path, const std::vector<ScoredExample>& rows);

// Fixed-point helper shared by the CSV writers.
std::string format_fixed(double value, int decimals);
double round_to(double value, int decimals);

}  // namespace egogate
