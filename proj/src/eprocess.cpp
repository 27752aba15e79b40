#include "eselect/eprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eselect {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !(lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1)");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
}

void check_bounded(double x) {
  if (!(std::fabs(x) <= 0.5)) {
    throw std::invalid_argument("transformed difference must lie in [-1/2, 1/2]");
  }
}

void refresh_logs(EProcessState& state) {
  const double psi_v = psi_sub_exponential(state.lambda) * state.var_sum;
  state.log_e_pq = state.lambda * state.sum - psi_v;
  state.log_e_qp = -state.lambda * state.sum - psi_v;
}

}  // namespace

double psi_sub_exponential(double lambda) {
  check_lambda(lambda);
  return -std::log1p(-lambda) - lambda;
}

double psi_sub_gaussian(double lambda) {
  check_lambda(lambda);
  return 0.5 * lambda * lambda;
}

double rejection_log_threshold(double alpha) {
  check_alpha(alpha);
  return std::log(2.0 / alpha);
}

EProcessState make_eprocess(double lambda, double alpha, std::int64_t anchor) {
  check_lambda(lambda);
  check_alpha(alpha);
  EProcessState state;
  state.lambda = lambda;
  state.alpha = alpha;
  state.window_anchor = anchor;
  return state;
}

double variance_increment(double bounded_diff, double prev_window_mean) {
  check_bounded(bounded_diff);
  const double d = bounded_diff - prev_window_mean;
  return d * d;
}

EProcessState update_eprocess(EProcessState state, double bounded_diff) {
  const double prev_mean =
      state.steps > 0 ? state.sum / static_cast<double>(state.steps) : 0.0;
  state.var_sum += variance_increment(bounded_diff, prev_mean);
  state.sum += bounded_diff;
  ++state.steps;
  refresh_logs(state);
  return state;
}

EProcessState restart_window(EProcessState state, std::int64_t anchor) {
  if (anchor <= state.window_anchor) {
    throw std::invalid_argument("window anchor must advance monotonically");
  }
  state.window_anchor = anchor;
  state.steps = 0;
  state.sum = 0.0;
  state.var_sum = 0.0;
  state.log_e_pq = 0.0;
  state.log_e_qp = 0.0;
  return state;
}

EProcessState eprocess_from_stats(const WindowStats& stats, double lambda,
                                  double alpha, std::int64_t anchor) {
  EProcessState state = make_eprocess(lambda, alpha, anchor);
  state.steps = stats.n;
  state.sum = stats.sum;
  state.var_sum = stats.var_sum;
  refresh_logs(state);
  return state;
}

TestVerdict run_test(const EProcessState& state) {
  const double threshold = rejection_log_threshold(state.alpha);
  TestVerdict verdict;
  verdict.reject_pq = state.log_e_pq >= threshold;
  verdict.reject_qp = state.log_e_qp >= threshold;
  verdict.p_value_pq = std::min(1.0, std::exp(-state.log_e_pq));
  verdict.p_value_qp = std::min(1.0, std::exp(-state.log_e_qp));
  return verdict;
}

ConfidenceBand confidence_band(const EProcessState& state,
                               const TransformSpec& spec, std::int64_t step) {
  if (!(state.lambda > 0.0)) {
    throw std::invalid_argument("confidence band undefined for lambda = 0");
  }
  if (state.steps < 1) {
    throw std::invalid_argument("confidence band needs at least one observation");
  }
  check_alpha(state.alpha);
  const double boundary = (psi_sub_exponential(state.lambda) * state.var_sum -
                           std::log(state.alpha / 2.0)) /
                          state.lambda;
  const double half = boundary / static_cast<double>(state.steps);
  const double center = state.sum / static_cast<double>(state.steps);

  ConfidenceBand band;
  band.step = step;
  band.lower = center - half;
  band.upper = center + half;
  if (std::fabs(band.lower) < 0.5) {
    band.lower_watts = unbound_diff(band.lower, spec);
  }
  if (std::fabs(band.upper) < 0.5) {
    band.upper_watts = unbound_diff(band.upper, spec);
  }
  return band;
}

}  // namespace eselect
