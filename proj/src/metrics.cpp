#include "egogate/metrics.hpp"

#include <stdexcept>

namespace egogate {

namespace {

void check_labels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
  }
}

// ratio with the 0-denominator convention; flags when it fires
double safe_ratio(long long num, long long den, bool& flagged) {
  if (den == 0) {
    flagged = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("prediction/truth length mismatch");
  }
  check_labels(predictions);
  check_labels(truths);
  ConfusionCounts c;
  for (size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == 1) {
      (predictions[i] == 1 ? c.tp : c.fn)++;
    } else {
      (predictions[i] == 1 ? c.fp : c.tn)++;
    }
  }
  return c;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  if (sum <= 0.0) return 0.0;
  return 2.0 * precision * recall / sum;
}

ClassMetrics metrics(const ConfusionCounts& counts) {
  if (counts.tp < 0 || counts.fp < 0 || counts.tn < 0 || counts.fn < 0) {
    throw std::invalid_argument("negative confusion cell");
  }
  if (counts.total() == 0) throw std::invalid_argument("empty confusion matrix");

  ClassMetrics m;
  bool flagged = false;
  m.c1.precision = safe_ratio(counts.tp, counts.tp + counts.fp, flagged);
  m.c1.recall = safe_ratio(counts.tp, counts.tp + counts.fn, flagged);
  m.c1.f1 = f1_score(m.c1.precision, m.c1.recall);
  m.c1.support = counts.tp + counts.fn;
  m.c0.precision = safe_ratio(counts.tn, counts.tn + counts.fn, flagged);
  m.c0.recall = safe_ratio(counts.tn, counts.tn + counts.fp, flagged);
  m.c0.f1 = f1_score(m.c0.precision, m.c0.recall);
  m.c0.support = counts.tn + counts.fp;
  if ((m.c1.precision + m.c1.recall == 0.0 && m.c1.support > 0) ||
      (m.c0.precision + m.c0.recall == 0.0 && m.c0.support > 0)) {
    flagged = true;
  }
  m.zero_denominator = flagged;

  const double supports[] = {static_cast<double>(m.c0.support), static_cast<double>(m.c1.support)};
  const double total = supports[0] + supports[1];
  m.weighted_precision = (m.c0.precision * supports[0] + m.c1.precision * supports[1]) / total;
  m.weighted_recall = (m.c0.recall * supports[0] + m.c1.recall * supports[1]) / total;
  m.weighted_f1 = (m.c0.f1 * supports[0] + m.c1.f1 * supports[1]) / total;
  return m;
}

double weighted_average(std::span<const double> values, std::span<const long long> supports) {
  if (values.size() != supports.size() || values.empty()) {
    throw std::invalid_argument("values/supports mismatch");
  }
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (supports[i] < 0) throw std::invalid_argument("negative support");
    num += values[i] * static_cast<double>(supports[i]);
    den += static_cast<double>(supports[i]);
  }
  if (den == 0.0) throw std::invalid_argument("zero total support");
  return num / den;
}

std::vector<SweepPoint> threshold_sweep(std::span<const double> scores,
                                        std::span<const int> truths,
                                        std::span<const double> taus) {
  if (scores.size() != truths.size()) throw std::invalid_argument("scores/truths length mismatch");
  if (scores.empty()) throw std::invalid_argument("empty score set");
  check_labels(truths);
  for (double s : scores) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("score outside [0, 1]");
  }
  std::vector<SweepPoint> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau outside [0, 1]");
    ConfusionCounts c;
    for (size_t i = 0; i < scores.size(); ++i) {
      const int pred = scores[i] >= tau ? 1 : 0;
      if (truths[i] == 1) {
        (pred == 1 ? c.tp : c.fn)++;
      } else {
        (pred == 1 ? c.fp : c.tn)++;
      }
    }
    bool flagged = false;
    SweepPoint p;
    p.tau = tau;
    p.precision = safe_ratio(c.tp, c.tp + c.fp, flagged);
    p.recall = safe_ratio(c.tp, c.tp + c.fn, flagged);
    p.f1 = f1_score(p.precision, p.recall);
    out.push_back(p);
  }
  return out;
}

double false_positive_rate(std::span<const double> scores, double tau) {
  if (scores.empty()) throw std::invalid_argument("empty score set");
  long long hits = 0;
  for (double s : scores) {
    if (s >= tau) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double fppm(const std::vector<ActivationInterval>& predicted, const GroundTruthIntervals& truth) {
  if (!(truth.duration_sec > 0.0)) throw std::invalid_argument("duration must be positive");
  for (size_t i = 0; i < truth.spans.size(); ++i) {
    if (truth.spans[i].stop_sec <= truth.spans[i].start_sec) {
      throw std::invalid_argument("truth span with stop <= start");
    }
    if (i > 0 && truth.spans[i].start_sec < truth.spans[i - 1].stop_sec) {
      throw std::invalid_argument("truth spans must be sorted and disjoint");
    }
  }
  long long false_pos = 0;
  for (const auto& p : predicted) {
    if (p.stop_sec <= p.start_sec) throw std::invalid_argument("predicted span with stop <= start");
    bool overlaps = false;
    for (const auto& t : truth.spans) {
      if (p.start_sec < t.stop_sec && t.start_sec < p.stop_sec) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) ++false_pos;
  }
  return static_cast<double>(false_pos) / (truth.duration_sec / 60.0);
}

}  // namespace egogate
