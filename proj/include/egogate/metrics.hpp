#pragma once

#include <span>
#include <vector>

#include "egogate/trigger.hpp"

namespace egogate {

// Binary confusion cells with class C1 (interaction) as positive.
struct ConfusionCounts {
  long long tp = 0;
  long long fp = 0;
  long long tn = 0;
  long long fn = 0;

  long long total() const { return tp + fp + tn + fn; }
};

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long support = 0;
};

struct ClassMetrics {
  PerClassMetrics c0;
  PerClassMetrics c1;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  // True when any precision/recall/F1 denominator was zero and the metric was
  // reported as 0 by convention.
  bool zero_denominator = false;
};

// Counts cells over paired label sequences (values restricted to {0, 1}).
ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> truths);

// 2*P*R/(P+R); 0 when P+R is zero.
double f1_score(double precision, double recall);

// Per-class precision/recall/F1. C0 metrics come from swapping the positive
// class (precision0 = tn/(tn+fn), recall0 = tn/(tn+fp)). Weighted averages use
// class supports (support1 = tp+fn, support0 = tn+fp). Zero denominators
// produce 0 and set the flag.
ClassMetrics metrics(const ConfusionCounts& counts);

// Support-weighted mean of per-class values: sum(v_k*s_k)/sum(s_k).
double weighted_average(std::span<const double> values, std::span<const long long> supports);

struct SweepPoint {
  double tau = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// For each tau, predict C1 iff score >= tau and report C1 metrics.
std::vector<SweepPoint> threshold_sweep(std::span<const double> scores,
                                        std::span<const int> truths,
                                        std::span<const double> taus);

// Fraction of a negative-only score set at or above tau.
double false_positive_rate(std::span<const double> scores, double tau);

struct GroundTruthIntervals {
  std::vector<ActivationInterval> spans;  // sorted, disjoint
  double duration_sec = 0.0;
};

// False positives per minute: a predicted interval counts as a false positive
// iff it overlaps no truth span (half-open overlap test). Rate is FP count
// divided by duration in minutes.
double fppm(const std::vector<ActivationInterval>& predicted, const GroundTruthIntervals& truth);

}  // namespace egogate
