#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "egogate/metrics.hpp"
#include "egogate/power.hpp"

using namespace egogate;

TEST_CASE("confusion counts cells with class 1 positive") {
  SUBCASE("perfect predictions") {
    const std::vector<int> y = {0, 1, 1, 0};
    const auto c = confusion(y, y);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(c.tp == 2);
    CHECK(c.tn == 2);
  }
  SUBCASE("all-positive predictor") {
    const std::vector<int> pred = {1, 1, 1, 1};
    const std::vector<int> truth = {0, 1, 0, 1};
    const auto c = confusion(pred, truth);
    CHECK(c.tn == 0);
    CHECK(c.fn == 0);
    CHECK(c.tp == 2);
    CHECK(c.fp == 2);
  }
  SUBCASE("hand-counted six example case") {
    const std::vector<int> pred = {1, 0, 1, 1, 0, 0};
    const std::vector<int> truth = {1, 1, 0, 1, 0, 1};
    const auto c = confusion(pred, truth);
    CHECK(c.tp == 2);
    CHECK(c.fn == 2);
    CHECK(c.fp == 1);
    CHECK(c.tn == 1);
  }
  SUBCASE("validation") {
    CHECK_THROWS(confusion(std::vector<int>{1}, std::vector<int>{1, 0}));
    CHECK_THROWS(confusion(std::vector<int>{2}, std::vector<int>{1}));
  }
}

TEST_CASE("f1 combines published precision and recall to the published score") {
  const double f1 = f1_score(0.90, 0.92);
  CHECK(f1 == doctest::Approx(0.9099).epsilon(1e-3));
  CHECK(std::round(f1 * 100.0) / 100.0 == doctest::Approx(0.91));
  CHECK(f1_score(0.0, 0.0) == 0.0);
}

TEST_CASE("weighted average reproduces the published table aggregation") {
  const std::vector<double> f1s = {0.15, 0.91};
  const std::vector<long long> supports = {251, 2095};
  const double avg = weighted_average(f1s, supports);
  CHECK(avg == doctest::Approx(0.8287).epsilon(1e-3));
  CHECK(std::round(avg * 100.0) / 100.0 == doctest::Approx(0.83));
}

TEST_CASE("metrics swaps the positive class for C0 and weights by support") {
  ConfusionCounts c;
  c.tp = 90;
  c.fn = 10;
  c.fp = 20;
  c.tn = 30;
  const auto m = metrics(c);
  CHECK(m.c1.precision == doctest::Approx(90.0 / 110.0));
  CHECK(m.c1.recall == doctest::Approx(0.9));
  CHECK(m.c1.support == 100);
  CHECK(m.c0.precision == doctest::Approx(30.0 / 40.0));
  CHECK(m.c0.recall == doctest::Approx(30.0 / 50.0));
  CHECK(m.c0.support == 50);
  CHECK_FALSE(m.zero_denominator);
  const double expect_wf1 = (m.c0.f1 * 50 + m.c1.f1 * 100) / 150.0;
  CHECK(m.weighted_f1 == doctest::Approx(expect_wf1));
}

TEST_CASE("metrics is scale free") {
  ConfusionCounts c;
  c.tp = 7;
  c.fn = 3;
  c.fp = 4;
  c.tn = 11;
  const auto base = metrics(c);
  ConfusionCounts scaled;
  scaled.tp = 7 * 9;
  scaled.fn = 3 * 9;
  scaled.fp = 4 * 9;
  scaled.tn = 11 * 9;
  const auto big = metrics(scaled);
  CHECK(big.c1.f1 == doctest::Approx(base.c1.f1));
  CHECK(big.c0.f1 == doctest::Approx(base.c0.f1));
  CHECK(big.weighted_f1 == doctest::Approx(base.weighted_f1));
}

TEST_CASE("weighted average sits between the per-class extremes") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(0.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    const std::vector<double> vals = {v(rng), v(rng)};
    const std::vector<long long> sup = {1 + static_cast<long long>(rng() % 100),
                                        1 + static_cast<long long>(rng() % 100)};
    const double avg = weighted_average(vals, sup);
    CHECK(avg >= std::min(vals[0], vals[1]) - 1e-12);
    CHECK(avg <= std::max(vals[0], vals[1]) + 1e-12);
  }
}

TEST_CASE("zero-denominator cells report 0 and set the flag") {
  ConfusionCounts c;
  c.tn = 5;  // no positive predictions, no positive truths
  const auto m = metrics(c);
  CHECK(m.c1.precision == 0.0);
  CHECK(m.c1.recall == 0.0);
  CHECK(m.c1.f1 == 0.0);
  CHECK(m.zero_denominator);
  CHECK_THROWS(metrics(ConfusionCounts{}));
}

TEST_CASE("threshold sweep predicts positive at or above tau") {
  const std::vector<double> scores = {0.1, 0.4, 0.6, 0.9};
  const std::vector<int> truths = {0, 1, 0, 1};

  SUBCASE("tau 0 predicts everything positive") {
    const auto pts = threshold_sweep(scores, truths, std::vector<double>{0.0});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].recall == doctest::Approx(1.0));
    CHECK(pts[0].precision == doctest::Approx(0.5));
  }
  SUBCASE("tau above the max score predicts nothing") {
    const auto pts = threshold_sweep(scores, truths, std::vector<double>{0.95});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].recall == 0.0);
  }
  SUBCASE("boundary scores are inclusive") {
    const auto pts = threshold_sweep(scores, truths, std::vector<double>{0.4});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].recall == doctest::Approx(1.0));
    CHECK(pts[0].precision == doctest::Approx(2.0 / 3.0));
  }
}

TEST_CASE("sweep recall and FPR are non-increasing in tau") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores;
  std::vector<int> truths;
  for (int i = 0; i < 400; ++i) {
    scores.push_back(u(rng));
    truths.push_back(static_cast<int>(rng() % 2));
  }
  std::vector<double> taus;
  for (int i = 0; i <= 20; ++i) taus.push_back(i / 20.0);

  const auto pts = threshold_sweep(scores, truths, taus);
  std::vector<double> negatives;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (truths[i] == 0) negatives.push_back(scores[i]);
  }
  for (size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].recall <= pts[i - 1].recall + 1e-12);
    CHECK(false_positive_rate(negatives, pts[i].tau) <=
          false_positive_rate(negatives, pts[i - 1].tau) + 1e-12);
  }
}

TEST_CASE("false_positive_rate counts the fraction at or above tau") {
  std::vector<double> zeros(100, 0.0);
  CHECK(false_positive_rate(zeros, 0.4) == 0.0);

  std::vector<double> scores(1000, 0.1);
  for (int i = 0; i < 71; ++i) scores[static_cast<size_t>(i)] = 0.9;
  CHECK(false_positive_rate(scores, 0.4) == doctest::Approx(0.071));
  CHECK(false_positive_rate(scores, 0.95) == 0.0);
  CHECK_THROWS(false_positive_rate(std::vector<double>{}, 0.4));
}

TEST_CASE("fppm counts predictions with zero truth overlap") {
  GroundTruthIntervals truth;
  truth.duration_sec = 300.0;
  truth.spans = {{10.0, 20.0}, {100.0, 130.0}};

  SUBCASE("twelve false triggers in five minutes") {
    std::vector<ActivationInterval> pred;
    for (int i = 0; i < 12; ++i) {
      pred.push_back({140.0 + 10.0 * i, 145.0 + 10.0 * i});
    }
    CHECK(fppm(pred, truth) == doctest::Approx(2.4));
  }
  SUBCASE("every prediction overlaps truth") {
    CHECK(fppm({{12.0, 14.0}, {99.0, 101.0}}, truth) == 0.0);
  }
  SUBCASE("three false positives in ninety seconds") {
    GroundTruthIntervals t90;
    t90.duration_sec = 90.0;
    t90.spans = {{0.0, 10.0}};
    CHECK(fppm({{20.0, 21.0}, {30.0, 31.0}, {40.0, 41.0}}, t90) == doctest::Approx(2.0));
  }
  SUBCASE("touching a truth span does not count as overlap") {
    CHECK(fppm({{20.0, 25.0}}, truth) == doctest::Approx(60.0 / 300.0));
  }
}

TEST_CASE("fppm is invariant under splitting a truth span") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int it = 0; it < 50; ++it) {
    std::vector<ActivationInterval> pred;
    for (int i = 0; i < 10; ++i) {
      const double a = u(rng);
      pred.push_back({a, a + 1.0 + u(rng) / 50.0});
    }
    GroundTruthIntervals whole;
    whole.duration_sec = 120.0;
    whole.spans = {{30.0, 60.0}};
    GroundTruthIntervals halves;
    halves.duration_sec = 120.0;
    halves.spans = {{30.0, 45.0}, {45.0, 60.0}};
    CHECK(fppm(pred, whole) == fppm(pred, halves));
  }
}

TEST_CASE("fppm validates spans") {
  GroundTruthIntervals truth;
  truth.duration_sec = 0.0;
  CHECK_THROWS(fppm({}, truth));
  truth.duration_sec = 60.0;
  truth.spans = {{10.0, 5.0}};
  CHECK_THROWS(fppm({}, truth));
  truth.spans = {{10.0, 20.0}, {15.0, 30.0}};
  CHECK_THROWS(fppm({}, truth));
}

TEST_CASE("duty cycle power reproduces the published operating rows") {
  SUBCASE("continuous capture") {
    const auto b = duty_cycle_power({{"system", 4.20, 1.0, 0.0},
                                     {"microphone", 0.17, 1.0, 0.0},
                                     {"camera", 0.60, 1.0, 0.0}});
    CHECK(b.total_w == doctest::Approx(4.97));
  }
  SUBCASE("triggered capture") {
    const auto b = duty_cycle_power({{"system", 3.50, 1.0, 0.0},
                                     {"microphone", 0.17, 1.0, 0.0},
                                     {"camera", 0.44, 1.0, 0.0}});
    CHECK(b.total_w == doctest::Approx(4.11));
  }
}

TEST_CASE("a zero-duty component contributes only idle power") {
  const auto b = duty_cycle_power({{"camera", 0.60, 0.0, 0.0}});
  CHECK(b.total_w == 0.0);
  const auto idle = duty_cycle_power({{"camera", 0.60, 0.0, 0.25}});
  CHECK(idle.total_w == doctest::Approx(0.25));
}

TEST_CASE("duty cycle power is linear in duty") {
  for (int d = 0; d <= 10; ++d) {
    const double duty = d / 10.0;
    const auto b = duty_cycle_power({{"cam", 0.8, duty, 0.2}});
    CHECK(b.total_w == doctest::Approx(0.8 * duty + 0.2 * (1.0 - duty)));
  }
}

TEST_CASE("duty cycle power validates components") {
  CHECK_THROWS(duty_cycle_power({{"bad", -1.0, 0.5, 0.0}}));
  CHECK_THROWS(duty_cycle_power({{"bad", 1.0, 1.5, 0.0}}));
  CHECK_THROWS(duty_cycle_power({{"bad", 1.0, 0.5, -0.1}}));
}
