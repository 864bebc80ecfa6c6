#pragma once

#include <string>
#include <vector>

#include "egogate/trigger.hpp"

namespace egogate {

// Video timeline addressed by frame index. Frame i covers timestamp i/fps,
// and frames exist for i in [0, floor(duration_sec * fps)).
struct FrameTimeline {
  double fps = 30.0;
  double duration_sec = 0.0;

  long long frame_count() const;
  double frame_time(long long index) const { return static_cast<double>(index) / fps; }
};

// Per-frame capture decisions for one timeline.
struct GatingPlan {
  FrameTimeline timeline;
  std::vector<bool> captured;  // length == timeline.frame_count()

  long long frames_captured() const;
  // Run-length form: consecutive captured frames [i..j] become the span
  // [i/fps, (j+1)/fps).
  std::vector<ActivationInterval> captured_intervals() const;
};

struct GatingReport {
  long long frames_total = 0;
  long long frames_captured = 0;
  double frames_reduced_pct = 0.0;  // 100 * (1 - captured/total)
  double capture_fraction = 0.0;    // captured/total
  double est_bitrate_mbps = 0.0;    // full_bitrate * capture_fraction
  double full_bitrate_mbps = 0.0;
};

// Marks frame i captured iff start <= i/fps < stop for some activation
// interval. Intervals may arrive unsorted/overlapping; they are merged first.
GatingPlan apply_intervals(const FrameTimeline& timeline,
                           const std::vector<ActivationInterval>& intervals);

// Periodic baseline: capture the first frame whose timestamp reaches each
// period boundary k*period_sec. period = 5 s at 30 FPS keeps one frame per
// 150, i.e. effectively 0.2 FPS.
GatingPlan decimate(const FrameTimeline& timeline, double period_sec = 5.0);

// Frame-count statistics plus the linear bitrate estimate
// est_bitrate = full_bitrate * capture_fraction.
GatingReport report(const GatingPlan& plan, double full_bitrate_mbps);

// Complement of the (merged) interval set within [0, duration_sec].
std::vector<ActivationInterval> complement_intervals(
    const std::vector<ActivationInterval>& intervals, double duration_sec);

// Textual between(t,a,b) selection expression covering every non-captured
// span, terms joined by '+'. Full coverage yields an empty string. Pure
// string generation for an external re-encode tool; no video is touched.
std::string emit_blackout_expr(const std::vector<ActivationInterval>& captured_intervals,
                               double duration_sec);
std::string emit_blackout_expr(const GatingPlan& plan);

}  // namespace egogate
