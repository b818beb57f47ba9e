#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cuegrid/policy.hpp"

using namespace cuegrid;

TEST_CASE("schedule_value: paper alpha schedule") {
  const DecaySchedule alpha{0.55, 0.999, 0.08};
  CHECK(schedule_value(alpha, 0) == 0.55);
  // 0.55 * 0.999^2399 ~ 0.0499 < floor
  CHECK(schedule_value(alpha, 2399) == 0.08);
  CHECK(schedule_value(alpha, 100) ==
        doctest::Approx(0.55 * std::pow(0.999, 100)));
}

TEST_CASE("schedule_value: factor 1 is constant") {
  const DecaySchedule s{0.3, 1.0, 0.01};
  for (int e : {0, 1, 10, 100000}) CHECK(schedule_value(s, e) == 0.3);
}

TEST_CASE("action_scores: disabled bias returns the hybrid values") {
  PavlovianTable pav(2);
  pav.q(0, 2) = 5.0;
  const ActionVector q{1.0, 2.0, 3.0, 4.0, 5.0};
  const ActionVector off = action_scores(q, pav, 0, 1.0, false);
  CHECK(off == q);
  const ActionVector on = action_scores(q, pav, 0, 1.0, true);
  CHECK(on[2] == 8.0);
  CHECK(on[0] == 1.0);
}

TEST_CASE("action_scores: pure bias passes through on a zero table") {
  PavlovianTable pav(1);
  pav.q(0, 2) = 5.0;
  const ActionVector zero{};
  const ActionVector scores = action_scores(zero, pav, 0, 1.0, true);
  CHECK(scores == ActionVector{0.0, 0.0, 5.0, 0.0, 0.0});
}

TEST_CASE("uniform pavlovian values do not move the probabilities") {
  PavlovianTable pav(1);
  for (int a = 0; a < kNumActions; ++a) pav.q(0, a) = 3.25;
  const ActionVector q{0.3, -0.7, 1.1, 0.0, 2.2};
  const ActionVector p_off = softmax_probs(action_scores(q, pav, 0, 1.0, false), 0.7);
  const ActionVector p_on = softmax_probs(action_scores(q, pav, 0, 1.0, true), 0.7);
  for (int a = 0; a < kNumActions; ++a)
    CHECK(p_on[a] == doctest::Approx(p_off[a]).epsilon(1e-12));
}

TEST_CASE("softmax: equal scores give the uniform distribution") {
  const ActionVector probs = softmax_probs({2.0, 2.0, 2.0, 2.0, 2.0}, 1.0);
  for (double p : probs) CHECK(p == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("softmax: two-point logistic value") {
  // scores (1, 0) at tau 1 over two actions: (0.7311, 0.2689); embed the
  // remaining actions far below so they carry no mass.
  const ActionVector probs = softmax_probs({1.0, 0.0, -1e6, -1e6, -1e6}, 1.0);
  CHECK(probs[0] == doctest::Approx(0.731058578630).epsilon(1e-9));
  CHECK(probs[1] == doctest::Approx(0.268941421370).epsilon(1e-9));
}

TEST_CASE("softmax: floor temperature with a wide gap is demonstrably greedy") {
  // exp(-5 / 0.08) ~ 7e-28, so the greedy mass rounds to exactly 1.0
  const ActionVector probs = softmax_probs({5.0, 0.0, 0.0, 0.0, 0.0}, 0.08);
  CHECK(probs[0] >= 1.0 - 1e-20);
  for (int a = 1; a < kNumActions; ++a) CHECK(probs[a] < 1e-20);
}

TEST_CASE("softmax: probabilities sum to one within 1e-12") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 2000; ++i) {
    ActionVector scores;
    for (double& s : scores) s = (uniform01(rng) - 0.5) * 2e6;
    const double tau = 0.08 + uniform01(rng) * 3.0;
    const ActionVector probs = softmax_probs(scores, tau);
    double sum = 0.0;
    for (double p : probs) {
      CHECK(std::isfinite(p));
      sum += p;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("softmax: shift invariance within 1e-12") {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 2000; ++i) {
    ActionVector scores;
    for (double& s : scores) s = (uniform01(rng) - 0.5) * 10.0;
    const double tau = 0.08 + uniform01(rng) * 2.0;
    const double shift = (uniform01(rng) - 0.5) * 100.0;
    ActionVector shifted = scores;
    for (double& s : shifted) s += shift;
    const ActionVector p0 = softmax_probs(scores, tau);
    const ActionVector p1 = softmax_probs(shifted, tau);
    for (int a = 0; a < kNumActions; ++a)
      CHECK(std::fabs(p0[a] - p1[a]) <= 1e-12);
  }
}

TEST_CASE("softmax: raising one score raises its probability") {
  ActionVector scores{0.2, -1.0, 0.5, 3.0, 0.0};
  const ActionVector before = softmax_probs(scores, 0.9);
  scores[1] += 0.8;
  const ActionVector after = softmax_probs(scores, 0.9);
  CHECK(after[1] > before[1]);
}

TEST_CASE("softmax rejects invalid inputs") {
  CHECK_THROWS_AS(softmax_probs({0, 0, 0, 0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(
      softmax_probs({std::nan(""), 0, 0, 0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(softmax_probs({INFINITY, 0, 0, 0, 0}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("sample_action: degenerate distribution always picks its atom") {
  Rng rng = make_rng(77);
  for (int i = 0; i < 100; ++i)
    CHECK(sample_action({1.0, 0.0, 0.0, 0.0, 0.0}, rng) == Action::Up);
}

TEST_CASE("sample_action: fixed seed reproduces the sequence bit-exactly") {
  const ActionVector probs{0.1, 0.2, 0.3, 0.25, 0.15};
  Rng r1 = make_rng(31337), r2 = make_rng(31337);
  for (int i = 0; i < 500; ++i)
    CHECK(sample_action(probs, r1) == sample_action(probs, r2));
}

TEST_CASE("sample_action: frequencies track the distribution") {
  const ActionVector probs{0.2, 0.2, 0.2, 0.2, 0.2};
  Rng rng = make_rng(99);
  int counts[kNumActions] = {};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[int(sample_action(probs, rng))];
  for (int a = 0; a < kNumActions; ++a)
    CHECK(std::fabs(double(counts[a]) / n - 0.2) < 0.01);
}
