#include "egogate/gating.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace egogate {

namespace {

constexpr double kTimeEps = 1e-9;

void check_timeline(const FrameTimeline& timeline) {
  if (!(timeline.fps > 0.0)) throw std::invalid_argument("fps must be positive");
  if (!(timeline.duration_sec > 0.0)) throw std::invalid_argument("duration must be positive");
}

std::string format_sec(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

long long FrameTimeline::frame_count() const {
  return static_cast<long long>(std::floor(duration_sec * fps + kTimeEps));
}

long long GatingPlan::frames_captured() const {
  return static_cast<long long>(std::count(captured.begin(), captured.end(), true));
}

std::vector<ActivationInterval> GatingPlan::captured_intervals() const {
  std::vector<ActivationInterval> runs;
  const long long n = static_cast<long long>(captured.size());
  for (long long i = 0; i < n;) {
    if (!captured[i]) {
      ++i;
      continue;
    }
    long long j = i;
    while (j + 1 < n && captured[j + 1]) ++j;
    runs.push_back({timeline.frame_time(i), timeline.frame_time(j + 1)});
    i = j + 1;
  }
  return runs;
}

GatingPlan apply_intervals(const FrameTimeline& timeline,
                           const std::vector<ActivationInterval>& intervals) {
  check_timeline(timeline);
  const auto merged = merge_intervals(intervals);
  GatingPlan plan;
  plan.timeline = timeline;
  plan.captured.assign(static_cast<size_t>(timeline.frame_count()), false);
  size_t k = 0;
  for (long long i = 0; i < static_cast<long long>(plan.captured.size()); ++i) {
    const double t = timeline.frame_time(i);
    while (k < merged.size() && merged[k].stop_sec <= t) ++k;
    if (k < merged.size() && merged[k].start_sec <= t && t < merged[k].stop_sec) {
      plan.captured[static_cast<size_t>(i)] = true;
    }
  }
  return plan;
}

GatingPlan decimate(const FrameTimeline& timeline, double period_sec) {
  check_timeline(timeline);
  if (!(period_sec > 0.0)) throw std::invalid_argument("period must be positive");
  GatingPlan plan;
  plan.timeline = timeline;
  plan.captured.assign(static_cast<size_t>(timeline.frame_count()), false);
  // Capture the first frame reaching each boundary k*period, then skip to the
  // next boundary past that frame. Epsilon guards boundaries that fall exactly
  // on a frame timestamp.
  long long k = 0;
  for (long long i = 0; i < static_cast<long long>(plan.captured.size()); ++i) {
    const double t = timeline.frame_time(i);
    if (t >= static_cast<double>(k) * period_sec - kTimeEps) {
      plan.captured[static_cast<size_t>(i)] = true;
      k = static_cast<long long>(std::floor((t + kTimeEps) / period_sec)) + 1;
    }
  }
  return plan;
}

GatingReport report(const GatingPlan& plan, double full_bitrate_mbps) {
  if (plan.captured.empty()) throw std::invalid_argument("empty timeline");
  if (!(full_bitrate_mbps > 0.0)) throw std::invalid_argument("bitrate must be positive");
  GatingReport rep;
  rep.frames_total = static_cast<long long>(plan.captured.size());
  rep.frames_captured = plan.frames_captured();
  rep.capture_fraction =
      static_cast<double>(rep.frames_captured) / static_cast<double>(rep.frames_total);
  rep.frames_reduced_pct = 100.0 * (1.0 - rep.capture_fraction);
  rep.full_bitrate_mbps = full_bitrate_mbps;
  rep.est_bitrate_mbps = full_bitrate_mbps * rep.capture_fraction;
  return rep;
}

std::vector<ActivationInterval> complement_intervals(
    const std::vector<ActivationInterval>& intervals, double duration_sec) {
  if (!(duration_sec > 0.0)) throw std::invalid_argument("duration must be positive");
  std::vector<ActivationInterval> gaps;
  double cursor = 0.0;
  for (const auto& iv : merge_intervals(intervals)) {
    const double a = std::max(0.0, iv.start_sec);
    const double b = std::min(duration_sec, iv.stop_sec);
    if (b <= a) continue;
    if (a > cursor) gaps.push_back({cursor, a});
    cursor = std::max(cursor, b);
  }
  if (cursor < duration_sec) gaps.push_back({cursor, duration_sec});
  return gaps;
}

std::string emit_blackout_expr(const std::vector<ActivationInterval>& captured_intervals,
                               double duration_sec) {
  std::string expr;
  for (const auto& gap : complement_intervals(captured_intervals, duration_sec)) {
    if (!expr.empty()) expr += '+';
    expr += "between(t," + format_sec(gap.start_sec) + "," + format_sec(gap.stop_sec) + ")";
  }
  return expr;
}

std::string emit_blackout_expr(const GatingPlan& plan) {
  return emit_blackout_expr(plan.captured_intervals(), plan.timeline.duration_sec);
}

}  // namespace egogate
