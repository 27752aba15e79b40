/**
 * Python bindings for the core operations: scoring, the bounding transform,
 * evidence updates, selection runs, the oracle benchmark, and the Monte
 * Carlo validators. Matrix inputs are (steps x horizon) float64 arrays.
 */

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "eselect/config.hpp"
#include "eselect/eprocess.hpp"
#include "eselect/ingest.hpp"
#include "eselect/run.hpp"
#include "eselect/selection.hpp"
#include "eselect/synthetic.hpp"
#include "eselect/transform.hpp"
#include "eselect/version.hpp"

namespace py = pybind11;
using namespace eselect;

namespace {

std::vector<double> to_vector(const py::array_t<double>& array) {
  const auto buf = array.request();
  if (buf.ndim != 1) {
    throw py::value_error("expected a one-dimensional float64 array");
  }
  const auto* data = static_cast<const double*>(buf.ptr);
  const auto stride = buf.strides[0] / static_cast<py::ssize_t>(sizeof(double));
  std::vector<double> out(static_cast<std::size_t>(buf.shape[0]));
  for (py::ssize_t i = 0; i < buf.shape[0]; ++i) {
    out[static_cast<std::size_t>(i)] = data[i * stride];
  }
  return out;
}

std::vector<ForecastTriple> to_triples(const py::array_t<double>& p,
                                       const py::array_t<double>& q,
                                       const py::array_t<double>& y) {
  const auto bp = p.request();
  const auto bq = q.request();
  const auto by = y.request();
  if (bp.ndim != 2 || bq.ndim != 2 || by.ndim != 2) {
    throw py::value_error("p, q, y must be (steps x horizon) arrays");
  }
  if (bp.shape[0] != bq.shape[0] || bp.shape[0] != by.shape[0] ||
      bp.shape[1] != bq.shape[1] || bp.shape[1] != by.shape[1]) {
    throw py::value_error("p, q, y must share one shape");
  }
  const auto rows = bp.shape[0];
  const auto cols = bp.shape[1];
  const auto at = [](const py::buffer_info& b, py::ssize_t r, py::ssize_t c) {
    const auto* base = static_cast<const char*>(b.ptr);
    return *reinterpret_cast<const double*>(base + r * b.strides[0] +
                                            c * b.strides[1]);
  };
  std::vector<ForecastTriple> triples(static_cast<std::size_t>(rows));
  for (py::ssize_t r = 0; r < rows; ++r) {
    auto& t = triples[static_cast<std::size_t>(r)];
    t.step = static_cast<std::int64_t>(r) + 1;
    t.p.resize(static_cast<std::size_t>(cols));
    t.q.resize(static_cast<std::size_t>(cols));
    t.y.resize(static_cast<std::size_t>(cols));
    for (py::ssize_t c = 0; c < cols; ++c) {
      t.p[static_cast<std::size_t>(c)] = at(bp, r, c);
      t.q[static_cast<std::size_t>(c)] = at(bq, r, c);
      t.y[static_cast<std::size_t>(c)] = at(by, r, c);
    }
  }
  return triples;
}

RunConfig make_config(double alpha, double lambda, long omega,
                      const std::string& strategy, long lag, long calibration,
                      std::uint64_t seed, const std::string& initial) {
  RunConfig cfg;
  cfg.alpha = alpha;
  cfg.lambdas = {lambda};
  cfg.omegas = {omega};
  cfg.strategies = {parse_strategy(strategy)};
  cfg.lag = lag;
  cfg.calibration_length = calibration;
  cfg.seed = seed;
  cfg.initial_arm = parse_arm(initial);
  return cfg;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["alpha"] = s.alpha;
  d["lambda"] = s.lambda;
  d["omega"] = s.omega;
  d["strategy"] = strategy_name(s.strategy);
  d["lag"] = s.lag;
  d["total_steps"] = s.total_steps;
  d["horizon"] = s.horizon;
  d["calibration_steps"] = s.calibration_steps;
  d["selection_steps"] = s.selection_steps;
  d["warmup_steps"] = s.warmup_steps;
  d["decided_steps"] = s.decided_steps;
  d["discrete_steps"] = s.discrete_steps;
  d["better_steps"] = s.better_steps;
  d["first_decided_step"] = s.first_decided_step;
  d["sigma"] = s.sigma;
  d["degenerate_scale"] = s.degenerate_scale;
  d["avg_fused"] = s.avg_fused;
  d["avg_p"] = s.avg_p;
  d["avg_q"] = s.avg_q;
  d["avg_oracle"] = s.avg_oracle;
  d["excluded"] = s.excluded;
  if (const auto f = s.fraction_better()) {
    d["fraction_better"] = *f;
  } else {
    d["fraction_better"] = py::none();
  }
  return d;
}

py::dict run_result_dict(const RunResult& run) {
  py::dict d;
  d["summary"] = summary_dict(run.summary);
  d["sigma"] = run.transform.sigma;

  const auto n = static_cast<py::ssize_t>(run.records.size());
  py::array_t<std::int64_t> step(n);
  py::array_t<double> raw(n), bounded(n), log_e_pq(n), log_e_qp(n);
  py::array_t<double> fused_mae(n), mae_p(n), mae_q(n), w_p(n);
  py::list source;
  auto step_m = step.mutable_unchecked<1>();
  auto raw_m = raw.mutable_unchecked<1>();
  auto bounded_m = bounded.mutable_unchecked<1>();
  auto pq_m = log_e_pq.mutable_unchecked<1>();
  auto qp_m = log_e_qp.mutable_unchecked<1>();
  auto fused_m = fused_mae.mutable_unchecked<1>();
  auto mp_m = mae_p.mutable_unchecked<1>();
  auto mq_m = mae_q.mutable_unchecked<1>();
  auto wp_m = w_p.mutable_unchecked<1>();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (py::ssize_t i = 0; i < n; ++i) {
    const StepRecord& rec = run.records[static_cast<std::size_t>(i)];
    step_m(i) = rec.step;
    raw_m(i) = rec.raw_diff;
    bounded_m(i) = rec.bounded_diff;
    pq_m(i) = rec.log_e_pq;
    qp_m(i) = rec.log_e_qp;
    fused_m(i) = rec.fused_mae ? *rec.fused_mae : nan;
    mp_m(i) = rec.mae_p;
    mq_m(i) = rec.mae_q;
    wp_m(i) = rec.decision.source == Source::Warmup ? nan : rec.decision.w_p;
    source.append(source_name(rec.decision.source));
  }
  d["step"] = step;
  d["raw_diff"] = raw;
  d["bounded_diff"] = bounded;
  d["log_e_pq"] = log_e_pq;
  d["log_e_qp"] = log_e_qp;
  d["fused_mae"] = fused_mae;
  d["mae_p"] = mae_p;
  d["mae_q"] = mae_q;
  d["w_p"] = w_p;
  d["source"] = source;
  return d;
}

SyntheticStreamSpec make_stream_spec(const std::string& kind, double shift,
                                     const std::vector<long>& switch_points,
                                     long length, long replications,
                                     std::uint64_t seed,
                                     const std::string& family) {
  SyntheticStreamSpec spec;
  if (kind == "null") {
    spec.kind = StreamKind::NullSymmetric;
  } else if (kind == "shift") {
    spec.kind = StreamKind::ConstantShift;
  } else if (kind == "regime") {
    spec.kind = StreamKind::RegimeSwitch;
  } else {
    throw py::value_error("kind must be 'null', 'shift', or 'regime'");
  }
  if (family == "uniform") {
    spec.family = NullFamily::Uniform;
  } else if (family == "normal") {
    spec.family = NullFamily::TransformedNormal;
  } else {
    throw py::value_error("family must be 'uniform' or 'normal'");
  }
  spec.shift = shift;
  spec.switch_points = switch_points;
  spec.length = length;
  spec.replications = replications;
  spec.seed = seed;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_eselect, m) {
  m.doc() = "Sequential e-value forecast comparison and fusion";
  m.attr("__version__") = kVersion;

  m.def(
      "mae",
      [](const py::array_t<double>& forecast, const py::array_t<double>& outcome) {
        return mae(to_vector(forecast), to_vector(outcome));
      },
      py::arg("forecast"), py::arg("outcome"),
      "Mean absolute error over a forecast horizon.");

  m.def(
      "score_difference",
      [](const py::array_t<double>& p, const py::array_t<double>& q,
         const py::array_t<double>& y) {
        ForecastTriple t;
        t.step = 1;
        t.p = to_vector(p);
        t.q = to_vector(q);
        t.y = to_vector(y);
        return score_difference(t);
      },
      py::arg("p"), py::arg("q"), py::arg("y"),
      "mae(p, y) - mae(q, y); negative favors P.");

  m.def("psi_sub_exponential", &psi_sub_exponential, py::arg("lam"));
  m.def("psi_sub_gaussian", &psi_sub_gaussian, py::arg("lam"));
  m.def("normal_cdf", &normal_cdf, py::arg("z"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));

  py::class_<TransformSpec>(m, "TransformSpec")
      .def(py::init([](double sigma, long calibration_length) {
             return TransformSpec{sigma, calibration_length};
           }),
           py::arg("sigma"), py::arg("calibration_length") = 0)
      .def_readonly("sigma", &TransformSpec::sigma)
      .def_readonly("calibration_length", &TransformSpec::calibration_length);

  m.def(
      "calibrate_scale",
      [](const py::array_t<double>& raw, long calibration_length) {
        return calibrate_scale(to_vector(raw), calibration_length);
      },
      py::arg("raw_diffs"), py::arg("calibration_length"),
      "Sample standard deviation of the first calibration_length differences.");
  m.def("bound", &bound_diff, py::arg("x"), py::arg("spec"),
        "Map a raw difference into (-1/2, 1/2).");
  m.def("unbound", &unbound_diff, py::arg("b"), py::arg("spec"),
        "Back-transform a bounded difference to Watts.");

  m.def(
      "fusion_weights",
      [](double p_value_pq, double p_value_qp) {
        return fusion_weights(p_value_pq, p_value_qp);
      },
      py::arg("p_value_pq"), py::arg("p_value_qp"),
      "Evidence weights ((1 + p - p*)/2, rest).");

  m.def(
      "run_selection",
      [](const py::array_t<double>& p, const py::array_t<double>& q,
         const py::array_t<double>& y, double alpha, double lam, long omega,
         const std::string& strategy, long lag, long calibration,
         std::uint64_t seed, const std::string& initial, bool records) {
        const auto triples = to_triples(p, q, y);
        const RunConfig cfg = make_config(alpha, lam, omega, strategy, lag,
                                          calibration, seed, initial);
        const RunResult run = run_selection(cfg, triples, records);
        return run_result_dict(run);
      },
      py::arg("p"), py::arg("q"), py::arg("y"), py::arg("alpha") = 0.05,
      py::arg("lam") = 0.1, py::arg("omega") = 672,
      py::arg("strategy") = "persistence", py::arg("lag") = 96,
      py::arg("calibration") = 672, py::arg("seed") = 1,
      py::arg("initial") = "P", py::arg("records") = true,
      "Run the full selection procedure over (steps x horizon) arrays.");

  m.def(
      "oracle_benchmark",
      [](const py::array_t<double>& p, const py::array_t<double>& q,
         const py::array_t<double>& y, long calibration) {
        const auto triples = to_triples(p, q, y);
        const BenchmarkScores b = oracle_benchmark(triples, calibration);
        py::dict d;
        d["oracle"] = b.oracle;
        d["baseline_p"] = b.baseline_p;
        d["baseline_q"] = b.baseline_q;
        d["steps"] = b.steps;
        return d;
      },
      py::arg("p"), py::arg("q"), py::arg("y"), py::arg("calibration") = 0,
      "Average scores: both baselines and the per-step best pick.");

  m.def(
      "ingest",
      [](const std::string& path) {
        const Dataset data = ingest(path);
        const auto rows = static_cast<py::ssize_t>(data.triples.size());
        const auto cols = static_cast<py::ssize_t>(data.horizon);
        py::array_t<double> p({rows, cols}), q({rows, cols}), y({rows, cols});
        py::array_t<std::int64_t> step(rows);
        auto pm = p.mutable_unchecked<2>();
        auto qm = q.mutable_unchecked<2>();
        auto ym = y.mutable_unchecked<2>();
        auto sm = step.mutable_unchecked<1>();
        for (py::ssize_t r = 0; r < rows; ++r) {
          const auto& t = data.triples[static_cast<std::size_t>(r)];
          sm(r) = t.step;
          for (py::ssize_t c = 0; c < cols; ++c) {
            pm(r, c) = t.p[static_cast<std::size_t>(c)];
            qm(r, c) = t.q[static_cast<std::size_t>(c)];
            ym(r, c) = t.y[static_cast<std::size_t>(c)];
          }
        }
        py::dict d;
        d["step"] = step;
        d["p"] = p;
        d["q"] = q;
        d["y"] = y;
        d["horizon"] = data.horizon;
        d["max_shift_mismatch"] = data.max_shift_mismatch;
        return d;
      },
      py::arg("path"), "Parse a dataset file into arrays.");

  m.def(
      "simulate_fwer",
      [](const std::string& kind, const std::string& family, long length,
         long replications, std::uint64_t seed, double lam, long omega,
         double alpha, double shift, const std::vector<long>& switch_points) {
        const auto spec = make_stream_spec(kind, shift, switch_points, length,
                                           replications, seed, family);
        const FwerResult r = simulate_fwer(spec, lam, omega, alpha);
        py::dict d;
        d["rate_pq"] = r.rate_pq;
        d["rate_qp"] = r.rate_qp;
        d["rate_either"] = r.rate_either;
        d["std_error"] = r.std_error;
        d["replications"] = r.replications;
        return d;
      },
      py::arg("kind") = "null", py::arg("family") = "uniform",
      py::arg("length") = 1000, py::arg("replications") = 1000,
      py::arg("seed") = 1, py::arg("lam") = 0.5, py::arg("omega") = 96,
      py::arg("alpha") = 0.05, py::arg("shift") = 0.0,
      py::arg("switch_points") = std::vector<long>{},
      "Crossing rate of either e-process on a null stream.");

  m.def(
      "simulate_coverage",
      [](const std::string& kind, long length, long replications,
         std::uint64_t seed, double lam, long omega, double alpha, double shift,
         const std::vector<long>& switch_points) {
        const auto spec = make_stream_spec(kind, shift, switch_points, length,
                                           replications, seed, "uniform");
        const CoverageResult r = simulate_coverage(spec, lam, omega, alpha);
        py::dict d;
        d["coverage"] = r.coverage;
        d["std_error"] = r.std_error;
        d["replications"] = r.replications;
        return d;
      },
      py::arg("kind") = "shift", py::arg("length") = 1000,
      py::arg("replications") = 1000, py::arg("seed") = 1, py::arg("lam") = 0.5,
      py::arg("omega") = 96, py::arg("alpha") = 0.05, py::arg("shift") = 0.1,
      py::arg("switch_points") = std::vector<long>{},
      "Simultaneous coverage of the confidence band.");

  m.def(
      "simulate_power",
      [](long length, long replications, std::uint64_t seed, double lam,
         long omega, double alpha, double shift) {
        SyntheticStreamSpec spec;
        spec.kind = StreamKind::ConstantShift;
        spec.shift = shift;
        spec.length = length;
        spec.replications = replications;
        spec.seed = seed;
        const PowerResult r = simulate_power(spec, lam, omega, alpha);
        py::dict d;
        d["median_delay"] = r.median_delay;
        d["crossed_fraction"] = r.crossed_fraction;
        d["replications"] = r.replications;
        return d;
      },
      py::arg("length") = 1000, py::arg("replications") = 1000,
      py::arg("seed") = 1, py::arg("lam") = 0.5, py::arg("omega") = 96,
      py::arg("alpha") = 0.05, py::arg("shift") = 0.2,
      "Median first-crossing step on a shifted stream.");
}
