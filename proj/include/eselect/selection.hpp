#pragma once

/**
 * Turning test verdicts into a fused forecast.
 *
 * The decision at step t is driven by the verdict recorded `lag` steps
 * earlier (one day at 15-minute resolution by default), so that the chosen
 * forecast only uses information that was available when it had to be
 * issued. A rejection picks the winning forecast outright; otherwise one of
 * three strategies fills the gap: keep the previous arm (persistence), draw
 * an arm with evidence-based probabilities (sampling), or blend both
 * forecasts with those weights (weighted average).
 */

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "eselect/eprocess.hpp"
#include "eselect/score.hpp"

namespace eselect {

enum class Strategy { Persistence, Sampling, WeightedAverage };

enum class Source { P, Q, Fused, Warmup };

struct SelectionDecision {
  std::int64_t step = 0;
  Source source = Source::Warmup;
  double w_p = 0.0;
  double w_q = 0.0;
  std::int64_t basis_step = 0;  ///< step whose verdict drove this decision
  Strategy strategy = Strategy::Persistence;
  bool double_rejection = false;  ///< both nulls rejected at the basis (anomaly)
};

struct FusedForecast {
  std::int64_t step = 0;
  std::vector<double> value;
  SelectionDecision decision;
};

/// Evidence weights (w_p, w_q) = ((1 + p - p*)/2, 1 - w_p) from the two
/// conservative p-values. Inputs must lie in (0, 1].
std::pair<double, double> fusion_weights(double p_value_pq, double p_value_qp);

/// The arm in force before any evidence exists.
SelectionDecision initial_decision(Source arm, Strategy strategy);

/// Decision for `step` given the verdict recorded at `basis_step`.
/// Rejections force the winning arm; with both sides rejected the larger
/// evidence (smaller p-value) wins and the anomaly is flagged. Otherwise the
/// strategy applies. The rng is consumed only on the sampling path.
SelectionDecision decide(const TestVerdict& basis_verdict,
                         const SelectionDecision& prev, Strategy strategy,
                         std::mt19937_64& rng, std::int64_t step,
                         std::int64_t basis_step);

/// Materializes the fused forecast for one step.
FusedForecast fuse(const ForecastTriple& triple,
                   const SelectionDecision& decision);

/// Portable deterministic uniform draw on [0, 1) (53-bit resolution).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace eselect
