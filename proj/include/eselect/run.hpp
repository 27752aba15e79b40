#pragma once

/**
 * Run orchestration: single selection runs, the oracle benchmark, and the
 * (omega x lambda x strategy) sweep.
 *
 * A run consumes the dataset in three regions: the calibration stretch
 * (estimates the transform scale, produces no records), a warmup stretch
 * (windows still filling, verdicts recorded but no forecast issued), and
 * the decided region (one fused forecast per step). Sweep cells share the
 * per-window statistics tables, which do not depend on lambda or strategy,
 * and derive their random substreams from the master seed, so any execution
 * order or degree of parallelism produces the identical result table.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include "eselect/config.hpp"
#include "eselect/eprocess.hpp"
#include "eselect/score.hpp"
#include "eselect/selection.hpp"
#include "eselect/transform.hpp"

namespace eselect {

struct StepRecord {
  std::int64_t step = 0;      ///< original step index from the input
  double raw_diff = 0.0;      ///< score difference, Watts
  double bounded_diff = 0.0;  ///< transformed difference
  long window_n = 0;          ///< observations in the window ending here
  bool window_full = false;
  double window_mean = 0.0;   ///< in-window mean (band center)
  double log_e_pq = 0.0;
  double log_e_qp = 0.0;
  TestVerdict verdict;
  std::optional<ConfidenceBand> band;  ///< absent when lambda == 0
  SelectionDecision decision;          ///< source == Warmup before a full window
  std::optional<double> fused_mae;     ///< Watts; absent during warmup
  double mae_p = 0.0;
  double mae_q = 0.0;
};

struct RunSummary {
  double alpha = 0.05;
  double lambda = 0.0;
  long omega = 0;
  Strategy strategy = Strategy::Persistence;
  long lag = 0;

  long total_steps = 0;        ///< dataset rows
  int horizon = 0;
  long calibration_steps = 0;
  long selection_steps = 0;    ///< rows after calibration
  long warmup_steps = 0;
  long decided_steps = 0;
  long discrete_steps = 0;     ///< decided steps issuing exactly P or Q
  long better_steps = 0;       ///< discrete steps that picked the lower-MAE side
  long double_rejections = 0;
  std::int64_t first_decided_step = 0;  ///< original index, 0 when none

  double sigma = 0.0;
  bool degenerate_scale = false;

  double avg_fused = 0.0;   ///< Watts, over the decided region
  double avg_p = 0.0;
  double avg_q = 0.0;
  double avg_oracle = 0.0;

  bool excluded = false;        ///< no conclusion within the comparability horizon
  long exclusion_horizon = 0;   ///< steps checked for an early conclusion

  /// Fraction of discrete steps that picked the strictly better side;
  /// disengaged when no discrete step exists.
  std::optional<double> fraction_better() const;
};

struct RunResult {
  RunSummary summary;
  TransformSpec transform;
  ScoreStream stream;               ///< per selection step
  std::vector<StepRecord> records;  ///< empty when records were not kept
};

/// Runs one configuration (the config grids must each hold exactly one
/// entry). With keep_records = false only the summary is produced.
RunResult run_selection(const RunConfig& config,
                        const std::vector<ForecastTriple>& triples,
                        bool keep_records = true);

struct BenchmarkScores {
  double oracle = 0.0;      ///< mean of the per-step lower MAE, Watts
  double baseline_p = 0.0;
  double baseline_q = 0.0;
  long steps = 0;           ///< post-calibration steps scored
};

/// Average scores over the post-calibration region: both baselines plus the
/// per-step best pick, the floor no selection rule can beat.
BenchmarkScores oracle_benchmark(const std::vector<ForecastTriple>& triples,
                                 long calibration_length);

struct SweepCell {
  long omega = 0;
  double lambda = 0.0;
  Strategy strategy = Strategy::Persistence;
  RunSummary summary;
  double runtime_seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  ///< ordered by (omega, lambda, strategy)
  std::vector<long> omegas;      ///< deduplicated sorted grid
  std::vector<double> lambdas;
  std::vector<Strategy> strategies;
  BenchmarkScores bench;
  long excluded_cells = 0;
  long improved_cells = 0;  ///< non-excluded cells beating the better baseline
  std::vector<double> scan_seconds;  ///< shared window-scan time per omega
};

/// Evaluates every grid combination. `threads` <= 1 runs serially; any
/// value yields the identical table.
SweepResult run_sweep(const RunConfig& config,
                      const std::vector<ForecastTriple>& triples,
                      int threads = 1);

}  // namespace eselect
