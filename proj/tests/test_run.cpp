#include "eselect/run.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "eselect/errors.hpp"
#include "support/test_oracles.hpp"

using namespace eselect;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.alpha = 0.05;
  cfg.lambdas = {0.5};
  cfg.omegas = {8};
  cfg.strategies = {Strategy::Persistence};
  cfg.lag = 4;
  cfg.calibration_length = 8;
  cfg.seed = 21;
  return cfg;
}

bool same_summary(const RunSummary& a, const RunSummary& b) {
  return a.decided_steps == b.decided_steps && a.warmup_steps == b.warmup_steps &&
         a.avg_fused == b.avg_fused && a.avg_p == b.avg_p && a.avg_q == b.avg_q &&
         a.avg_oracle == b.avg_oracle && a.sigma == b.sigma &&
         a.better_steps == b.better_steps && a.discrete_steps == b.discrete_steps &&
         a.excluded == b.excluded &&
         a.first_decided_step == b.first_decided_step;
}

}  // namespace

TEST_SUITE("run") {

TEST_CASE("identical forecasts flow through with unit e-values") {
  testing::FixtureOptions opt;
  opt.steps = 80;
  opt.horizon = 3;
  opt.p_noise = 2.0;
  opt.q_noise = 2.0;
  opt.shared_error = true;  // p == q exactly
  auto triples = testing::make_fixture(opt);
  for (auto& t : triples) t.q = t.p;

  const RunResult run = run_selection(small_config(), triples);
  CHECK(run.summary.degenerate_scale);
  CHECK(run.summary.sigma == 1.0);
  for (const StepRecord& rec : run.records) {
    CHECK(rec.raw_diff == 0.0);
    CHECK(rec.log_e_pq == 0.0);
    CHECK(rec.log_e_qp == 0.0);
    CHECK_FALSE(rec.verdict.reject_pq);
    CHECK_FALSE(rec.verdict.reject_qp);
  }
  CHECK(run.summary.avg_fused == doctest::Approx(run.summary.avg_p).epsilon(1e-15));
  CHECK(run.summary.avg_fused == doctest::Approx(run.summary.avg_q).epsilon(1e-15));
}

TEST_CASE("per-step evidence matches the brute-force oracle") {
  testing::FixtureOptions opt;
  opt.steps = 40;
  opt.horizon = 2;
  opt.q_noise = 3.0;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.calibration_length = 4;
  cfg.omegas = {6};
  cfg.lag = 2;
  cfg.lambdas = {0.35};
  const RunResult run = run_selection(cfg, triples);

  REQUIRE(run.records.size() == 36);
  const auto& bounded = run.stream.bounded;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const std::size_t lo = i + 1 >= 6 ? i + 1 - 6 : 0;
    const std::vector<double> window(bounded.begin() + lo,
                                     bounded.begin() + i + 1);
    const auto brute = testing::brute_evidence(window, 0.35);
    CHECK(std::fabs(run.records[i].log_e_pq - brute.log_e_pq) < 1e-12);
    CHECK(std::fabs(run.records[i].log_e_qp - brute.log_e_qp) < 1e-12);
  }
}

TEST_CASE("calibration steps produce no records and decisions wait for the window") {
  testing::FixtureOptions opt;
  opt.steps = 80;
  const auto triples = testing::make_fixture(opt);
  const RunConfig cfg = small_config();
  const RunResult run = run_selection(cfg, triples);

  CHECK(run.summary.calibration_steps == 8);
  CHECK(run.summary.selection_steps == 72);
  CHECK(run.records.size() == 72);
  CHECK(run.records.front().step == triples[8].step);

  CHECK(run.summary.warmup_steps == 7);
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const StepRecord& rec = run.records[i];
    if (i < 7) {
      CHECK(rec.decision.source == Source::Warmup);
      CHECK_FALSE(rec.fused_mae.has_value());
      CHECK(rec.window_n == static_cast<long>(i + 1));
      CHECK_FALSE(rec.window_full);
    } else {
      CHECK(rec.decision.source != Source::Warmup);
      CHECK(rec.fused_mae.has_value());
      CHECK(rec.window_full);
      CHECK(rec.window_n == 8);
    }
  }
  CHECK(run.summary.first_decided_step == triples[8 + 7].step);
  CHECK(run.summary.decided_steps == 65);
}

TEST_CASE("summaries are identical with and without records") {
  testing::FixtureOptions opt;
  opt.steps = 90;
  opt.q_noise = 2.5;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.strategies = {Strategy::Sampling};
  const RunResult with = run_selection(cfg, triples, true);
  const RunResult without = run_selection(cfg, triples, false);
  CHECK(same_summary(with.summary, without.summary));
  CHECK(without.records.empty());
}

TEST_CASE("a clearly better P gets certified and selected") {
  testing::FixtureOptions opt;
  opt.steps = 160;
  opt.horizon = 4;
  opt.p_noise = 1.0;
  opt.q_noise = 8.0;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.omegas = {16};
  const RunResult run = run_selection(cfg, triples);

  CHECK_FALSE(run.summary.excluded);
  long p_steps = 0;
  for (const StepRecord& rec : run.records) {
    if (rec.decision.source == Source::P) ++p_steps;
  }
  CHECK(p_steps > run.summary.decided_steps / 2);
  CHECK(run.summary.avg_fused < run.summary.avg_q);
  const auto fraction = run.summary.fraction_better();
  REQUIRE(fraction.has_value());
  CHECK(*fraction > 0.5);
}

TEST_CASE("statistically indistinguishable forecasts are flagged excluded") {
  testing::FixtureOptions opt;
  opt.steps = 90;
  opt.p_noise = 2.0;
  opt.q_noise = 2.0;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.lambdas = {0.1};
  const RunResult run = run_selection(cfg, triples);
  CHECK(run.summary.excluded);
  CHECK(run.summary.exclusion_horizon == std::min<long>(7 * cfg.lag, 82));
}

TEST_CASE("the fused score never beats the oracle for arm-selecting strategies") {
  for (const Strategy strategy : {Strategy::Persistence, Strategy::Sampling}) {
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      testing::FixtureOptions opt;
      opt.steps = 120;
      opt.q_noise = 2.0;
      opt.seed = seed;
      const auto triples = testing::make_fixture(opt);
      RunConfig cfg = small_config();
      cfg.strategies = {strategy};
      const RunResult run = run_selection(cfg, triples, false);
      CHECK(run.summary.avg_fused >= run.summary.avg_oracle - 1e-12);
    }
  }
}

TEST_CASE("blending also dominates the oracle when errors are shared") {
  testing::FixtureOptions opt;
  opt.steps = 120;
  opt.p_noise = 1.0;
  opt.q_noise = 4.0;
  opt.shared_error = true;  // same error shape: blending cannot cancel noise
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.strategies = {Strategy::WeightedAverage};
  const RunResult run = run_selection(cfg, triples, false);
  CHECK(run.summary.avg_fused >= run.summary.avg_oracle - 1e-12);
}

TEST_CASE("runs are deterministic") {
  testing::FixtureOptions opt;
  opt.steps = 100;
  opt.q_noise = 2.0;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.strategies = {Strategy::Sampling};
  const RunResult a = run_selection(cfg, triples);
  const RunResult b = run_selection(cfg, triples);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(same_summary(a.summary, b.summary));
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].decision.source == b.records[i].decision.source);
    CHECK(a.records[i].log_e_pq == b.records[i].log_e_pq);
    CHECK(a.records[i].decision.w_p == b.records[i].decision.w_p);
  }
}

TEST_CASE("decisions never look past their basis step") {
  testing::FixtureOptions opt;
  opt.steps = 120;
  opt.q_noise = 2.5;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.strategies = {Strategy::Sampling};
  cfg.omegas = {12};
  cfg.lag = 16;
  const RunResult base = run_selection(cfg, triples);

  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> bump(5.0, 50.0);
  for (int trial = 0; trial < 5; ++trial) {
    // pick a decided step and corrupt everything after its basis
    const std::size_t target = 40 + static_cast<std::size_t>(trial) * 10;
    REQUIRE(base.records[target].decision.source != Source::Warmup);
    const long s = static_cast<long>(target) + 1;
    auto mutated = triples;
    const std::size_t first_mutable =
        static_cast<std::size_t>(cfg.calibration_length + (s - cfg.lag));
    for (std::size_t i = first_mutable; i < mutated.size(); ++i) {
      for (auto& v : mutated[i].p) v += bump(rng);
      for (auto& v : mutated[i].y) v -= bump(rng);
    }
    const RunResult run = run_selection(cfg, mutated);
    const auto& got = run.records[target].decision;
    const auto& want = base.records[target].decision;
    CHECK(got.source == want.source);
    CHECK(got.w_p == want.w_p);
    CHECK(got.basis_step == want.basis_step);
  }
}

TEST_CASE("too little data is a configuration error") {
  testing::FixtureOptions opt;
  opt.steps = 20;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();  // needs > 8 + 8 + 4 steps
  CHECK_THROWS_AS(run_selection(cfg, triples), ConfigError);
  cfg.calibration_length = 25;
  CHECK_THROWS_AS(run_selection(cfg, triples), ConfigError);
}

TEST_CASE("single runs insist on scalar parameters") {
  testing::FixtureOptions opt;
  opt.steps = 60;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.lambdas = {0.1, 0.5};
  CHECK_THROWS_AS(run_selection(cfg, triples), ConfigError);
}

TEST_CASE("oracle benchmark on alternating winners") {
  std::vector<ForecastTriple> triples(2);
  triples[0].step = 1;
  triples[0].p = {1.0};
  triples[0].q = {2.0};
  triples[0].y = {0.0};
  triples[1].step = 2;
  triples[1].p = {2.0};
  triples[1].q = {1.0};
  triples[1].y = {0.0};
  const BenchmarkScores bench = oracle_benchmark(triples, 0);
  CHECK(bench.oracle == doctest::Approx(1.0));
  CHECK(bench.baseline_p == doctest::Approx(1.5));
  CHECK(bench.baseline_q == doctest::Approx(1.5));
  CHECK(bench.steps == 2);
}

TEST_CASE("oracle benchmark equals the baselines for identical forecasts") {
  testing::FixtureOptions opt;
  opt.steps = 30;
  opt.shared_error = true;
  auto triples = testing::make_fixture(opt);
  for (auto& t : triples) t.q = t.p;
  const BenchmarkScores bench = oracle_benchmark(triples, 10);
  CHECK(bench.oracle == doctest::Approx(bench.baseline_p));
  CHECK(bench.oracle == doctest::Approx(bench.baseline_q));
  CHECK(bench.steps == 20);
}

TEST_CASE("oracle stays below both baselines") {
  testing::FixtureOptions opt;
  opt.steps = 80;
  opt.q_noise = 3.0;
  const auto triples = testing::make_fixture(opt);
  const BenchmarkScores bench = oracle_benchmark(triples, 8);
  CHECK(bench.oracle <= bench.baseline_p + 1e-12);
  CHECK(bench.oracle <= bench.baseline_q + 1e-12);
}

TEST_CASE("sweep: a single cell reproduces the single run") {
  testing::FixtureOptions opt;
  opt.steps = 100;
  opt.q_noise = 2.5;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.strategies = {Strategy::Sampling};
  const RunResult single = run_selection(cfg, triples, false);
  const SweepResult sweep = run_sweep(cfg, triples);
  REQUIRE(sweep.cells.size() == 1);
  CHECK(same_summary(sweep.cells.front().summary, single.summary));
}

TEST_CASE("sweep deduplicates grid entries") {
  testing::FixtureOptions opt;
  opt.steps = 100;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.lambdas = {0.5, 0.1, 0.5};
  cfg.omegas = {8, 8};
  cfg.strategies = {Strategy::Persistence, Strategy::Persistence};
  const SweepResult sweep = run_sweep(cfg, triples);
  CHECK(sweep.cells.size() == 2);  // two unique lambdas x one omega x one strategy
  CHECK(sweep.lambdas == std::vector<double>{0.1, 0.5});
}

TEST_CASE("sweep tables are identical for any worker count") {
  testing::FixtureOptions opt;
  opt.steps = 120;
  opt.q_noise = 2.0;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.lambdas = {0.1, 0.3, 0.7};
  cfg.omegas = {4, 8, 16};
  cfg.strategies = {Strategy::Persistence, Strategy::Sampling,
                    Strategy::WeightedAverage};
  const SweepResult serial = run_sweep(cfg, triples, 1);
  const SweepResult threaded = run_sweep(cfg, triples, 4);
  REQUIRE(serial.cells.size() == threaded.cells.size());
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].omega == threaded.cells[i].omega);
    CHECK(serial.cells[i].lambda == threaded.cells[i].lambda);
    CHECK(serial.cells[i].strategy == threaded.cells[i].strategy);
    CHECK(same_summary(serial.cells[i].summary, threaded.cells[i].summary));
  }
}

TEST_CASE("sweep improvement accounting is consistent") {
  testing::FixtureOptions opt;
  opt.steps = 160;
  opt.q_noise = 6.0;
  const auto triples = testing::make_fixture(opt);
  RunConfig cfg = small_config();
  cfg.omegas = {8, 16};
  cfg.lambdas = {0.3, 0.6};
  const SweepResult sweep = run_sweep(cfg, triples);
  long improved = 0;
  long excluded = 0;
  for (const auto& cell : sweep.cells) {
    if (cell.summary.excluded) {
      ++excluded;
      continue;
    }
    if (cell.summary.avg_fused <
        std::min(cell.summary.avg_p, cell.summary.avg_q)) {
      ++improved;
    }
  }
  CHECK(improved == sweep.improved_cells);
  CHECK(excluded == sweep.excluded_cells);
  CHECK(sweep.bench.steps == 160 - 8);
}

}  // TEST_SUITE
