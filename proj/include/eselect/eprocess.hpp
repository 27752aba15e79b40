#pragma once

/**
 * Dual e-processes for sequential superiority testing.
 *
 * Two one-sided null hypotheses are monitored at once:
 *   H0(p,q): forecast Q is not better than P on average,
 *   H0(q,p): forecast P is not better than Q on average.
 * Evidence against each accumulates as an e-process
 *   E = exp(lambda * S - psi(lambda) * V)
 * where S is the running sum of transformed score differences within the
 * current window, V the variance process, and psi the sub-exponential rate
 * function. All arithmetic stays in the log domain; on long favorable
 * stretches E exceeds what a double can represent directly.
 *
 * Rejecting either null at familywise level alpha uses the threshold
 * 2/alpha (each one-sided test runs at level alpha/2).
 */

#include <cstdint>
#include <optional>

#include "eselect/transform.hpp"
#include "eselect/window.hpp"

namespace eselect {

/// Sub-exponential rate function -log(1 - lambda) - lambda on [0, 1).
double psi_sub_exponential(double lambda);

/// Sub-gaussian rate function lambda^2 / 2. Provided as a reference point;
/// the decision pipeline always runs on the sub-exponential variant.
double psi_sub_gaussian(double lambda);

/// log(2/alpha), the log-domain rejection threshold.
double rejection_log_threshold(double alpha);

/// Incremental state of one window's pair of e-processes.
struct EProcessState {
  double lambda = 0.0;   ///< growth-rate weight in [0, 1)
  double alpha = 0.05;   ///< familywise significance level in (0, 1)
  std::int64_t window_anchor = 0;  ///< step index where this window began
  long steps = 0;        ///< observations since the anchor
  double sum = 0.0;      ///< running sum of transformed differences
  double var_sum = 0.0;  ///< variance process V
  double log_e_pq = 0.0; ///< log evidence against H0(p,q); large favors Q
  double log_e_qp = 0.0; ///< log evidence against H0(q,p); large favors P
};

EProcessState make_eprocess(double lambda, double alpha,
                            std::int64_t anchor = 0);

/// Variance-process increment (x - m)^2 for one observation, with m the
/// window mean before the observation (0 at a window start).
double variance_increment(double bounded_diff, double prev_window_mean);

/// Folds one transformed difference into the state.
EProcessState update_eprocess(EProcessState state, double bounded_diff);

/// Clears the window; the anchor must advance. lambda/alpha are kept.
EProcessState restart_window(EProcessState state, std::int64_t anchor);

/// Builds the state a window scan implies for a given lambda/alpha.
EProcessState eprocess_from_stats(const WindowStats& stats, double lambda,
                                  double alpha, std::int64_t anchor = 0);

struct TestVerdict {
  bool reject_pq = false;   ///< H0(p,q) rejected: Q is superior
  bool reject_qp = false;   ///< H0(q,p) rejected: P is superior
  double p_value_pq = 1.0;  ///< min(1, 1/E) in (0, 1]
  double p_value_qp = 1.0;
};

TestVerdict run_test(const EProcessState& state);

/// Time-uniform confidence band for the window-average transformed
/// difference, plus back-transformed bounds where they exist. Bounds beyond
/// +/-1/2 have no Watt-scale counterpart and stay disengaged.
struct ConfidenceBand {
  std::int64_t step = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> lower_watts;
  std::optional<double> upper_watts;
};

/// Band centered on the in-window mean with half-width
/// (psi(lambda) * V - log(alpha/2)) / (lambda * n). Requires lambda > 0 and
/// at least one in-window observation.
ConfidenceBand confidence_band(const EProcessState& state,
                               const TransformSpec& spec, std::int64_t step);

}  // namespace eselect
