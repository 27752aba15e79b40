#include "eselect/selection.hpp"

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include <doctest.h>

using namespace eselect;

namespace {

TestVerdict verdict_of(double p_pq, double p_qp, bool reject_pq = false,
                       bool reject_qp = false) {
  TestVerdict v;
  v.p_value_pq = p_pq;
  v.p_value_qp = p_qp;
  v.reject_pq = reject_pq;
  v.reject_qp = reject_qp;
  return v;
}

ForecastTriple simple_triple(std::int64_t step, std::vector<double> p,
                             std::vector<double> q, std::vector<double> y) {
  ForecastTriple t;
  t.step = step;
  t.p = std::move(p);
  t.q = std::move(q);
  t.y = std::move(y);
  return t;
}

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("weights reduce to one half without evidence") {
  const auto [wp, wq] = fusion_weights(1.0, 1.0);
  CHECK(wp == 0.5);
  CHECK(wq == 0.5);
}

TEST_CASE("weights favor the side with surviving nulls") {
  const auto [wp, wq] = fusion_weights(1.0, 0.025);
  CHECK(wp == doctest::Approx(0.9875).epsilon(1e-15));
  CHECK(wq == doctest::Approx(0.0125).epsilon(1e-15));
}

TEST_CASE("swapping the p-values swaps the weights") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.001, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    const auto [wp1, wq1] = fusion_weights(a, b);
    const auto [wp2, wq2] = fusion_weights(b, a);
    CHECK(wp1 == doctest::Approx(wq2).epsilon(1e-15));
    CHECK(wq1 == doctest::Approx(wp2).epsilon(1e-15));
    CHECK(wp1 + wq1 == 1.0);  // exact by construction
  }
}

TEST_CASE("weights reject out-of-range p-values") {
  CHECK_THROWS_AS(fusion_weights(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(fusion_weights(0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(fusion_weights(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("rejections force the winning arm under any strategy") {
  std::mt19937_64 rng(3);
  const SelectionDecision prev = initial_decision(Source::Q, Strategy::Persistence);
  for (const Strategy strategy :
       {Strategy::Persistence, Strategy::Sampling, Strategy::WeightedAverage}) {
    const auto q_wins = decide(verdict_of(0.01, 1.0, true, false), prev, strategy,
                               rng, 200, 104);
    CHECK(q_wins.source == Source::Q);
    CHECK(q_wins.w_q == 1.0);
    CHECK(q_wins.basis_step == 104);

    const auto p_wins = decide(verdict_of(1.0, 0.01, false, true), prev, strategy,
                               rng, 200, 104);
    CHECK(p_wins.source == Source::P);
    CHECK(p_wins.w_p == 1.0);
  }
}

TEST_CASE("double rejection goes to the larger evidence and is flagged") {
  std::mt19937_64 rng(4);
  const SelectionDecision prev = initial_decision(Source::P, Strategy::Persistence);
  const auto d = decide(verdict_of(0.004, 0.020, true, true), prev,
                        Strategy::Persistence, rng, 10, 5);
  // smaller p-value against H0(p,q) means stronger evidence for Q
  CHECK(d.source == Source::Q);
  CHECK(d.double_rejection);

  const auto e = decide(verdict_of(0.020, 0.004, true, true), prev,
                        Strategy::Persistence, rng, 10, 5);
  CHECK(e.source == Source::P);
  CHECK(e.double_rejection);
}

TEST_CASE("persistence repeats the previous arm forever without evidence") {
  std::mt19937_64 rng(5);
  SelectionDecision prev = initial_decision(Source::P, Strategy::Persistence);
  for (int step = 1; step <= 200; ++step) {
    prev = decide(verdict_of(1.0, 1.0), prev, Strategy::Persistence, rng, step,
                  step - 96);
    CHECK(prev.source == Source::P);
    CHECK(prev.w_p == 1.0);
  }
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  const auto draw_sequence = [](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SelectionDecision prev = initial_decision(Source::P, Strategy::Sampling);
    std::vector<Source> sources;
    for (int step = 1; step <= 64; ++step) {
      prev = decide(verdict_of(0.8, 0.6), prev, Strategy::Sampling, rng, step,
                    step - 10);
      sources.push_back(prev.source);
    }
    return sources;
  };
  CHECK(draw_sequence(99) == draw_sequence(99));
  CHECK(draw_sequence(99) != draw_sequence(100));
}

TEST_CASE("weighted average produces a strictly interior blend") {
  std::mt19937_64 rng(6);
  const SelectionDecision prev = initial_decision(Source::P, Strategy::WeightedAverage);
  const auto d = decide(verdict_of(0.9, 0.3), prev, Strategy::WeightedAverage,
                        rng, 50, 40);
  CHECK(d.source == Source::Fused);
  CHECK(d.w_p > 0.0);
  CHECK(d.w_p < 1.0);
  CHECK(d.w_p == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(d.w_p + d.w_q == 1.0);
}

TEST_CASE("fuse returns the chosen arm exactly") {
  const auto triple = simple_triple(7, {2.0, 4.0}, {6.0, 8.0}, {3.0, 5.0});
  SelectionDecision d = initial_decision(Source::P, Strategy::Persistence);
  d.step = 7;
  CHECK(fuse(triple, d).value == triple.p);
  d.source = Source::Q;
  d.w_p = 0.0;
  d.w_q = 1.0;
  CHECK(fuse(triple, d).value == triple.q);
}

TEST_CASE("fuse blends convexly") {
  const auto triple = simple_triple(1, {2.0}, {4.0}, {0.0});
  SelectionDecision d;
  d.step = 1;
  d.source = Source::Fused;
  d.w_p = 0.5;
  d.w_q = 0.5;
  d.strategy = Strategy::WeightedAverage;
  CHECK(fuse(triple, d).value[0] == doctest::Approx(3.0));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    d.w_p = u(rng);
    d.w_q = 1.0 - d.w_p;
    const auto fused = fuse(triple, d);
    CHECK(fused.value[0] >= 2.0);
    CHECK(fused.value[0] <= 4.0);
  }
}

TEST_CASE("fuse guards step alignment and warmup") {
  const auto triple = simple_triple(7, {1.0}, {2.0}, {1.5});
  SelectionDecision d = initial_decision(Source::P, Strategy::Persistence);
  d.step = 8;
  CHECK_THROWS_AS(fuse(triple, d), std::invalid_argument);
  d.step = 7;
  d.source = Source::Warmup;
  CHECK_THROWS_AS(fuse(triple, d), std::invalid_argument);
}

TEST_CASE("sampling matches the weighted average in expectation") {
  const auto triple = simple_triple(1, {2.0}, {4.0}, {0.0});
  const double w_p = 0.7;
  const double wavg_value = w_p * 2.0 + (1.0 - w_p) * 4.0;

  std::mt19937_64 rng(123);
  const int draws = 20000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = uniform01(rng) < w_p ? 2.0 : 4.0;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  const double se = std::sqrt(var / draws);
  CHECK(std::fabs(mean - wavg_value) <= 3.0 * se);
  CHECK(var > 0.0);  // sampling variance strictly exceeds the blend's zero
}

}  // TEST_SUITE
