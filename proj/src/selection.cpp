#include "eselect/selection.hpp"

#include <stdexcept>
#include <string>

#include "eselect/errors.hpp"

namespace eselect {

namespace {

SelectionDecision arm_decision(Source arm, std::int64_t step,
                               std::int64_t basis_step, Strategy strategy) {
  SelectionDecision d;
  d.step = step;
  d.source = arm;
  d.w_p = arm == Source::P ? 1.0 : 0.0;
  d.w_q = 1.0 - d.w_p;
  d.basis_step = basis_step;
  d.strategy = strategy;
  return d;
}

}  // namespace

std::pair<double, double> fusion_weights(double p_value_pq, double p_value_qp) {
  const bool pq_ok = p_value_pq > 0.0 && p_value_pq <= 1.0;
  const bool qp_ok = p_value_qp > 0.0 && p_value_qp <= 1.0;
  if (!pq_ok || !qp_ok) {
    throw std::invalid_argument("p-values must lie in (0, 1]");
  }
  const double w_p = 0.5 * (1.0 + p_value_pq - p_value_qp);
  return {w_p, 1.0 - w_p};
}

SelectionDecision initial_decision(Source arm, Strategy strategy) {
  if (arm != Source::P && arm != Source::Q) {
    throw std::invalid_argument("initial arm must be P or Q");
  }
  return arm_decision(arm, 0, 0, strategy);
}

SelectionDecision decide(const TestVerdict& basis_verdict,
                         const SelectionDecision& prev, Strategy strategy,
                         std::mt19937_64& rng, std::int64_t step,
                         std::int64_t basis_step) {
  // Rejecting H0(q,p) certifies P as superior under the negatively oriented
  // score; rejecting H0(p,q) certifies Q.
  if (basis_verdict.reject_pq && basis_verdict.reject_qp) {
    // Possible across a window boundary; let the larger e-value win.
    const Source arm =
        basis_verdict.p_value_qp <= basis_verdict.p_value_pq ? Source::P : Source::Q;
    SelectionDecision d = arm_decision(arm, step, basis_step, strategy);
    d.double_rejection = true;
    return d;
  }
  if (basis_verdict.reject_qp) {
    return arm_decision(Source::P, step, basis_step, strategy);
  }
  if (basis_verdict.reject_pq) {
    return arm_decision(Source::Q, step, basis_step, strategy);
  }

  switch (strategy) {
    case Strategy::Persistence: {
      if (prev.source != Source::P && prev.source != Source::Q) {
        throw std::invalid_argument(
            "persistence needs a previous decision with a P or Q arm");
      }
      return arm_decision(prev.source, step, basis_step, strategy);
    }
    case Strategy::Sampling: {
      const auto [w_p, w_q] =
          fusion_weights(basis_verdict.p_value_pq, basis_verdict.p_value_qp);
      const Source arm = uniform01(rng) < w_p ? Source::P : Source::Q;
      SelectionDecision d = arm_decision(arm, step, basis_step, strategy);
      d.w_p = w_p;  // record the sampling probabilities, not the realized arm
      d.w_q = w_q;
      return d;
    }
    case Strategy::WeightedAverage: {
      const auto [w_p, w_q] =
          fusion_weights(basis_verdict.p_value_pq, basis_verdict.p_value_qp);
      SelectionDecision d;
      d.step = step;
      d.source = Source::Fused;
      d.w_p = w_p;
      d.w_q = w_q;
      d.basis_step = basis_step;
      d.strategy = strategy;
      return d;
    }
  }
  throw std::logic_error("unknown strategy");
}

FusedForecast fuse(const ForecastTriple& triple,
                   const SelectionDecision& decision) {
  if (decision.step != triple.step) {
    throw std::invalid_argument(
        "decision at step " + std::to_string(decision.step) +
        " cannot fuse forecasts of step " + std::to_string(triple.step));
  }
  triple.validate();
  FusedForecast fused;
  fused.step = triple.step;
  fused.decision = decision;
  switch (decision.source) {
    case Source::P:
      fused.value = triple.p;
      break;
    case Source::Q:
      fused.value = triple.q;
      break;
    case Source::Fused: {
      fused.value.resize(triple.p.size());
      for (std::size_t k = 0; k < triple.p.size(); ++k) {
        fused.value[k] = decision.w_p * triple.p[k] + decision.w_q * triple.q[k];
      }
      break;
    }
    case Source::Warmup:
      throw std::invalid_argument("no fused forecast exists during warmup");
  }
  return fused;
}

}  // namespace eselect
