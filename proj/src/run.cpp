#include "eselect/run.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "eselect/errors.hpp"
#include "eselect/rng.hpp"
#include "eselect/window.hpp"

namespace eselect {

namespace {

/// Everything a cell evaluation needs that does not depend on
/// (lambda, omega, strategy).
struct PreparedStream {
  const std::vector<ForecastTriple>* triples = nullptr;
  long calibration = 0;
  std::vector<std::int64_t> steps;  // original index per selection step
  std::vector<double> raw;          // score differences per selection step
  std::vector<double> bounded;
  std::vector<double> mae_p;
  std::vector<double> mae_q;
  TransformSpec transform;
  bool degenerate_scale = false;
  int horizon = 0;

  long selection_steps() const { return static_cast<long>(raw.size()); }
  const ForecastTriple& triple_at(long s) const {  // s is 1-based
    return (*triples)[static_cast<std::size_t>(calibration + s - 1)];
  }
};

void check_uniform_horizon(const std::vector<ForecastTriple>& triples) {
  if (triples.empty()) throw DataError("dataset holds no steps");
  const std::size_t h = triples.front().p.size();
  for (const auto& t : triples) {
    t.validate();
    if (t.p.size() != h) {
      throw DataError("step " + std::to_string(t.step) +
                      ": horizon differs from the first row");
    }
  }
}

PreparedStream prepare_stream(const std::vector<ForecastTriple>& triples,
                              long calibration_length) {
  check_uniform_horizon(triples);
  const long n = static_cast<long>(triples.size());
  if (n <= calibration_length) {
    throw ConfigError("dataset ends inside the calibration stretch (" +
                      std::to_string(n) + " rows, calibration " +
                      std::to_string(calibration_length) + ")");
  }

  std::vector<double> raw_all(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    raw_all[static_cast<std::size_t>(i)] =
        score_difference(triples[static_cast<std::size_t>(i)]);
  }

  PreparedStream prep;
  prep.triples = &triples;
  prep.calibration = calibration_length;
  prep.horizon = static_cast<int>(triples.front().p.size());

  try {
    prep.transform = calibrate_scale(raw_all, calibration_length);
  } catch (const DegenerateScaleError&) {
    const bool all_zero =
        std::all_of(raw_all.begin(), raw_all.begin() + calibration_length,
                    [](double v) { return v == 0.0; });
    if (!all_zero) throw;
    // Identical forecasts during calibration: the transform of an all-zero
    // stream is zero for any scale, so pick 1 W and note it.
    prep.transform = TransformSpec{1.0, calibration_length};
    prep.degenerate_scale = true;
  }

  const long m = n - calibration_length;
  prep.steps.resize(static_cast<std::size_t>(m));
  prep.raw.resize(static_cast<std::size_t>(m));
  prep.bounded.resize(static_cast<std::size_t>(m));
  prep.mae_p.resize(static_cast<std::size_t>(m));
  prep.mae_q.resize(static_cast<std::size_t>(m));
  for (long s = 0; s < m; ++s) {
    const auto& triple = triples[static_cast<std::size_t>(calibration_length + s)];
    const auto i = static_cast<std::size_t>(s);
    prep.steps[i] = triple.step;
    prep.raw[i] = raw_all[static_cast<std::size_t>(calibration_length + s)];
    prep.bounded[i] = bound_diff(prep.raw[i], prep.transform);
    prep.mae_p[i] = mae(triple.p, triple.y);
    prep.mae_q[i] = mae(triple.q, triple.y);
  }
  return prep;
}

std::vector<WindowStats> scan_windows(const PreparedStream& prep, long omega) {
  WindowScan scan(omega);
  std::vector<WindowStats> stats(prep.bounded.size());
  for (std::size_t i = 0; i < prep.bounded.size(); ++i) {
    stats[i] = scan.push(prep.bounded[i]);
  }
  return stats;
}

std::uint64_t cell_seed(std::uint64_t master, long omega, double lambda,
                        Strategy strategy) {
  return derive_seed(master, static_cast<std::uint64_t>(omega),
                     std::bit_cast<std::uint64_t>(lambda),
                     static_cast<std::uint64_t>(strategy));
}

double fused_step_mae(const PreparedStream& prep, long s,
                      const SelectionDecision& decision) {
  switch (decision.source) {
    case Source::P:
      return prep.mae_p[static_cast<std::size_t>(s - 1)];
    case Source::Q:
      return prep.mae_q[static_cast<std::size_t>(s - 1)];
    case Source::Fused: {
      const auto& triple = prep.triple_at(s);
      double sum = 0.0;
      for (std::size_t k = 0; k < triple.p.size(); ++k) {
        sum += std::fabs(decision.w_p * triple.p[k] +
                         decision.w_q * triple.q[k] - triple.y[k]);
      }
      return sum / static_cast<double>(triple.p.size());
    }
    case Source::Warmup:
      break;
  }
  throw std::logic_error("no fused score during warmup");
}

RunResult run_cell(const PreparedStream& prep,
                   const std::vector<WindowStats>& stats, double alpha,
                   double lambda, long omega, Strategy strategy, long lag,
                   std::uint64_t master_seed, Source initial_arm,
                   bool keep_records) {
  const long m = prep.selection_steps();
  if (m <= omega + lag) {
    throw ConfigError("need more than calibration + window + lag steps (" +
                      std::to_string(omega + lag) +
                      " after calibration), got " + std::to_string(m));
  }

  // Verdicts exist for every step; before a full window they come from the
  // stretch observed so far, exactly what a process anchored at the start of
  // the selection period would report.
  std::vector<TestVerdict> verdicts(static_cast<std::size_t>(m));
  std::vector<double> log_e_pq(static_cast<std::size_t>(m));
  std::vector<double> log_e_qp(static_cast<std::size_t>(m));
  const double psi = psi_sub_exponential(lambda);
  const double threshold = rejection_log_threshold(alpha);
  for (long s = 1; s <= m; ++s) {
    const auto i = static_cast<std::size_t>(s - 1);
    const double drift = lambda * stats[i].sum;
    const double decay = psi * stats[i].var_sum;
    log_e_pq[i] = drift - decay;
    log_e_qp[i] = -drift - decay;
    verdicts[i].reject_pq = log_e_pq[i] >= threshold;
    verdicts[i].reject_qp = log_e_qp[i] >= threshold;
    verdicts[i].p_value_pq = std::min(1.0, std::exp(-log_e_pq[i]));
    verdicts[i].p_value_qp = std::min(1.0, std::exp(-log_e_qp[i]));
  }

  RunResult result;
  RunSummary& sum = result.summary;
  sum.alpha = alpha;
  sum.lambda = lambda;
  sum.omega = omega;
  sum.strategy = strategy;
  sum.lag = lag;
  sum.total_steps = static_cast<long>(prep.triples->size());
  sum.horizon = prep.horizon;
  sum.calibration_steps = prep.calibration;
  sum.selection_steps = m;
  sum.sigma = prep.transform.sigma;
  sum.degenerate_scale = prep.degenerate_scale;
  result.transform = prep.transform;

  // Comparability flag: a combination that cannot reach any conclusion
  // within the first week of the selection period never seeds the
  // persistence arm with evidence.
  sum.exclusion_horizon = std::min<long>(7 * lag, m);
  sum.excluded = true;
  for (long s = 1; s <= sum.exclusion_horizon; ++s) {
    const auto& v = verdicts[static_cast<std::size_t>(s - 1)];
    if (v.reject_pq || v.reject_qp) {
      sum.excluded = false;
      break;
    }
  }

  std::mt19937_64 rng(cell_seed(master_seed, omega, lambda, strategy));
  SelectionDecision prev = initial_decision(initial_arm, strategy);
  const TestVerdict no_evidence{};

  double fused_sum = 0.0;
  double p_sum = 0.0;
  double q_sum = 0.0;
  double oracle_sum = 0.0;

  if (keep_records) {
    result.records.resize(static_cast<std::size_t>(m));
    result.stream.raw = prep.raw;
    result.stream.bounded = prep.bounded;
    result.stream.window = omega;
    result.stream.window_mean.assign(
        static_cast<std::size_t>(m), std::numeric_limits<double>::quiet_NaN());
  }

  for (long s = 1; s <= m; ++s) {
    const auto i = static_cast<std::size_t>(s - 1);
    const bool window_full = stats[i].n >= omega;

    SelectionDecision decision;
    std::optional<double> fused_mae;
    if (!window_full) {
      decision.step = prep.steps[i];
      decision.source = Source::Warmup;
      decision.strategy = strategy;
      decision.basis_step = 0;
      ++sum.warmup_steps;
    } else {
      const long basis = s - lag;
      const TestVerdict& basis_verdict =
          basis >= 1 ? verdicts[static_cast<std::size_t>(basis - 1)] : no_evidence;
      decision = decide(basis_verdict, prev, strategy, rng, prep.steps[i],
                        basis >= 1 ? prep.steps[static_cast<std::size_t>(basis - 1)]
                                   : 0);
      prev = decision;
      fused_mae = fused_step_mae(prep, s, decision);

      if (sum.decided_steps == 0) sum.first_decided_step = prep.steps[i];
      ++sum.decided_steps;
      if (decision.double_rejection) ++sum.double_rejections;
      fused_sum += *fused_mae;
      p_sum += prep.mae_p[i];
      q_sum += prep.mae_q[i];
      oracle_sum += std::min(prep.mae_p[i], prep.mae_q[i]);
      if (decision.source == Source::P || decision.source == Source::Q) {
        ++sum.discrete_steps;
        const double own = decision.source == Source::P ? prep.mae_p[i] : prep.mae_q[i];
        const double other = decision.source == Source::P ? prep.mae_q[i] : prep.mae_p[i];
        if (own < other) ++sum.better_steps;
      }
    }

    if (keep_records) {
      StepRecord& rec = result.records[i];
      rec.step = prep.steps[i];
      rec.raw_diff = prep.raw[i];
      rec.bounded_diff = prep.bounded[i];
      rec.window_n = stats[i].n;
      rec.window_full = window_full;
      rec.window_mean = stats[i].mean();
      rec.log_e_pq = log_e_pq[i];
      rec.log_e_qp = log_e_qp[i];
      rec.verdict = verdicts[i];
      if (lambda > 0.0) {
        rec.band = confidence_band(
            eprocess_from_stats(stats[i], lambda, alpha), prep.transform,
            prep.steps[i]);
      }
      rec.decision = decision;
      rec.fused_mae = fused_mae;
      rec.mae_p = prep.mae_p[i];
      rec.mae_q = prep.mae_q[i];
      if (window_full) {
        result.stream.window_mean[i] = stats[i].mean();
      }
    }
  }

  const double decided = static_cast<double>(sum.decided_steps);
  sum.avg_fused = fused_sum / decided;
  sum.avg_p = p_sum / decided;
  sum.avg_q = q_sum / decided;
  sum.avg_oracle = oracle_sum / decided;
  return result;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<Strategy> stable_unique(const std::vector<Strategy>& strategies) {
  std::vector<Strategy> out;
  for (const Strategy s : strategies) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

}  // namespace

std::optional<double> RunSummary::fraction_better() const {
  if (discrete_steps == 0) return std::nullopt;
  return static_cast<double>(better_steps) / static_cast<double>(discrete_steps);
}

RunResult run_selection(const RunConfig& config,
                        const std::vector<ForecastTriple>& triples,
                        bool keep_records) {
  config.validate();
  if (config.lambdas.size() != 1 || config.omegas.size() != 1 ||
      config.strategies.size() != 1) {
    throw ConfigError("a single run takes exactly one lambda, window, and "
                      "strategy; use the sweep for grids");
  }
  const PreparedStream prep = prepare_stream(triples, config.calibration_length);
  const auto stats = scan_windows(prep, config.omegas.front());
  return run_cell(prep, stats, config.alpha, config.lambdas.front(),
                  config.omegas.front(), config.strategies.front(), config.lag,
                  config.seed, config.initial_arm, keep_records);
}

BenchmarkScores oracle_benchmark(const std::vector<ForecastTriple>& triples,
                                 long calibration_length) {
  check_uniform_horizon(triples);
  const long n = static_cast<long>(triples.size());
  if (calibration_length < 0 || n <= calibration_length) {
    throw ConfigError("benchmark needs at least one step after calibration");
  }
  BenchmarkScores scores;
  for (long i = calibration_length; i < n; ++i) {
    const auto& triple = triples[static_cast<std::size_t>(i)];
    const double mp = mae(triple.p, triple.y);
    const double mq = mae(triple.q, triple.y);
    scores.baseline_p += mp;
    scores.baseline_q += mq;
    scores.oracle += std::min(mp, mq);
    ++scores.steps;
  }
  const double steps = static_cast<double>(scores.steps);
  scores.baseline_p /= steps;
  scores.baseline_q /= steps;
  scores.oracle /= steps;
  return scores;
}

SweepResult run_sweep(const RunConfig& config,
                      const std::vector<ForecastTriple>& triples, int threads) {
  config.validate();
  const PreparedStream prep = prepare_stream(triples, config.calibration_length);

  SweepResult result;
  result.omegas = sorted_unique(config.omegas);
  result.lambdas = sorted_unique(config.lambdas);
  result.strategies = stable_unique(config.strategies);
  result.bench = oracle_benchmark(triples, config.calibration_length);

  // Window statistics are shared by every lambda and strategy of an omega.
  std::vector<std::vector<WindowStats>> stats_tables(result.omegas.size());
  result.scan_seconds.resize(result.omegas.size());
  for (std::size_t w = 0; w < result.omegas.size(); ++w) {
    const auto start = std::chrono::steady_clock::now();
    stats_tables[w] = scan_windows(prep, result.omegas[w]);
    result.scan_seconds[w] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  }

  const std::size_t n_cells = result.omegas.size() * result.lambdas.size() *
                              result.strategies.size();
  result.cells.resize(n_cells);

  const auto evaluate = [&](std::size_t index) {
    const std::size_t per_omega = result.lambdas.size() * result.strategies.size();
    const std::size_t w = index / per_omega;
    const std::size_t rest = index % per_omega;
    const std::size_t l = rest / result.strategies.size();
    const std::size_t g = rest % result.strategies.size();

    SweepCell& cell = result.cells[index];
    cell.omega = result.omegas[w];
    cell.lambda = result.lambdas[l];
    cell.strategy = result.strategies[g];
    const auto start = std::chrono::steady_clock::now();
    cell.summary = run_cell(prep, stats_tables[w], config.alpha, cell.lambda,
                            cell.omega, cell.strategy, config.lag, config.seed,
                            config.initial_arm, /*keep_records=*/false)
                       .summary;
    cell.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  };

  const int workers = std::max(1, threads);
  if (workers == 1 || n_cells < 2) {
    for (std::size_t i = 0; i < n_cells; ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(
        std::min(static_cast<std::size_t>(workers), n_cells));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n_cells) break;
          evaluate(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const SweepCell& cell : result.cells) {
    if (cell.summary.excluded) {
      ++result.excluded_cells;
      continue;
    }
    const double better_baseline =
        std::min(cell.summary.avg_p, cell.summary.avg_q);
    if (cell.summary.avg_fused < better_baseline) ++result.improved_cells;
  }
  return result;
}

}  // namespace eselect
