/**
 * eselect - sequential forecast comparison and fusion.
 *
 * Subcommands:
 *   run       one configuration over a dataset, per-step records + metadata
 *   sweep     grid over windows, lambdas, and strategies
 *   validate  Monte Carlo certification of the statistical guarantees
 *   bench     oracle and baseline average scores
 *
 * Exit codes: 0 success, 1 usage or configuration error, 2 data error,
 * 3 validation failure.
 */

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "eselect/errors.hpp"
#include "eselect/ingest.hpp"
#include "eselect/report.hpp"
#include "eselect/run.hpp"
#include "eselect/synthetic.hpp"
#include "eselect/version.hpp"

namespace fs = std::filesystem;
using namespace eselect;

namespace {

struct CliOptions {
  std::string input;
  std::string output;
  std::string config_file;
  double alpha = 0.05;
  std::vector<double> lambdas;
  std::vector<std::string> omegas;
  std::vector<std::string> strategies;
  long lag = 96;
  long calibration = 672;
  std::uint64_t seed = 1;
  std::string initial_arm = "P";
  int threads = 0;

  // validate-only knobs
  long replications = 10000;
  long length = 1000;
};

void add_common_options(CLI::App* cmd, CliOptions& opt, bool needs_input) {
  if (needs_input) {
    cmd->add_option("-i,--input", opt.input, "dataset file (see README for the format)")
        ->required();
  }
  cmd->add_option("-o,--output", opt.output, "output directory");
  cmd->add_option("--alpha", opt.alpha, "familywise significance level");
  cmd->add_option("--lambda", opt.lambdas, "risk weight(s) in [0,1)");
  cmd->add_option("--omega", opt.omegas,
                  "window size(s): steps or duration (1h = 4, 7d = 672)");
  cmd->add_option("--strategy", opt.strategies,
                  "persistence | sampling | wavg");
  cmd->add_option("--lag", opt.lag, "decision lag in steps (default one day)");
  cmd->add_option("--calibration", opt.calibration,
                  "steps used to estimate the transform scale");
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--initial", opt.initial_arm,
                  "arm in force before any evidence (P or Q)");
  cmd->set_config("--config", "", "read options from an INI/TOML file");
}

RunConfig to_config(const CliOptions& opt, bool grid_defaults) {
  RunConfig cfg;
  cfg.input_path = opt.input;
  cfg.output_dir = opt.output;
  cfg.alpha = opt.alpha;
  cfg.lag = opt.lag;
  cfg.calibration_length = opt.calibration;
  cfg.seed = opt.seed;
  cfg.initial_arm = parse_arm(opt.initial_arm);

  if (!opt.lambdas.empty()) {
    cfg.lambdas = opt.lambdas;
  } else if (grid_defaults) {
    cfg.lambdas = default_lambda_grid();
  }
  if (!opt.omegas.empty()) {
    cfg.omegas.clear();
    for (const auto& text : opt.omegas) cfg.omegas.push_back(parse_window(text));
  } else if (grid_defaults) {
    cfg.omegas = default_omega_grid();
  }
  if (!opt.strategies.empty()) {
    cfg.strategies.clear();
    for (const auto& text : opt.strategies) {
      if (text == "all") {
        cfg.strategies = {Strategy::Persistence, Strategy::Sampling,
                          Strategy::WeightedAverage};
        break;
      }
      cfg.strategies.push_back(parse_strategy(text));
    }
  }
  cfg.validate();
  return cfg;
}

fs::path output_dir_or(const CliOptions& opt, const char* fallback) {
  return opt.output.empty() ? fs::path(fallback) : fs::path(opt.output);
}

int cmd_run(const CliOptions& opt) {
  const RunConfig cfg = to_config(opt, /*grid_defaults=*/false);
  const Dataset data = ingest(cfg.input_path);
  if (data.max_shift_mismatch > 0.0) {
    std::cerr << "note: outcome rows deviate from a one-step shift by up to "
              << format_double(data.max_shift_mismatch) << " W\n";
  }
  const RunResult run = run_selection(cfg, data.triples);

  const fs::path dir = output_dir_or(opt, "eselect-out");
  write_step_records(dir / "records.csv", run);
  write_run_metadata(dir / "metadata.json", cfg, &run.summary,
                     data.max_shift_mismatch);

  std::cout << "steps " << run.summary.total_steps << " (calibration "
            << run.summary.calibration_steps << ", decided "
            << run.summary.decided_steps << ")\n"
            << "sigma " << format_double(run.summary.sigma) << " W\n"
            << "average MAE: fused " << format_double(run.summary.avg_fused)
            << " W, P " << format_double(run.summary.avg_p) << " W, Q "
            << format_double(run.summary.avg_q) << " W, oracle "
            << format_double(run.summary.avg_oracle) << " W\n";
  if (const auto fraction = run.summary.fraction_better()) {
    std::cout << "better model selected in "
              << format_double(100.0 * *fraction) << "% of discrete steps\n";
  }
  std::cout << "wrote " << (dir / "records.csv").string() << "\n";
  return 0;
}

int cmd_sweep(const CliOptions& opt) {
  const RunConfig cfg = to_config(opt, /*grid_defaults=*/true);
  const Dataset data = ingest(cfg.input_path);
  const int threads = opt.threads > 0
                          ? opt.threads
                          : static_cast<int>(std::max(
                                1u, std::thread::hardware_concurrency()));
  const SweepResult sweep = run_sweep(cfg, data.triples, threads);

  const fs::path dir = output_dir_or(opt, "eselect-out");
  write_sweep_table(dir / "sweep.csv", sweep);
  for (const Strategy strategy : sweep.strategies) {
    write_heatmap(dir / ("heatmap_" + strategy_name(strategy) + ".csv"), sweep,
                  strategy);
  }
  write_timings(dir / "timings.csv", sweep);
  write_run_metadata(dir / "metadata.json", cfg, nullptr,
                     data.max_shift_mismatch);

  const long usable = static_cast<long>(sweep.cells.size()) - sweep.excluded_cells;
  std::cout << "cells " << sweep.cells.size() << " (excluded "
            << sweep.excluded_cells << ")\n"
            << "baselines: P " << format_double(sweep.bench.baseline_p)
            << " W, Q " << format_double(sweep.bench.baseline_q) << " W, oracle "
            << format_double(sweep.bench.oracle) << " W\n";
  if (usable > 0) {
    std::cout << "improved over the better baseline in "
              << format_double(100.0 * static_cast<double>(sweep.improved_cells) /
                               static_cast<double>(usable))
              << "% of usable cells\n";
  }
  std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_bench(const CliOptions& opt) {
  const Dataset data = ingest(opt.input);
  const BenchmarkScores bench = oracle_benchmark(data.triples, opt.calibration);
  std::cout << "steps scored " << bench.steps << "\n"
            << "oracle " << format_double(bench.oracle) << " W\n"
            << "P      " << format_double(bench.baseline_p) << " W\n"
            << "Q      " << format_double(bench.baseline_q) << " W\n";
  if (!opt.output.empty()) {
    const fs::path dir(opt.output);
    std::vector<ValidationCheck> none;
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "bench.csv", std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / "bench.csv").string());
    out << "steps,oracle_w,baseline_p_w,baseline_q_w\n"
        << bench.steps << ',' << format_double(bench.oracle) << ','
        << format_double(bench.baseline_p) << ','
        << format_double(bench.baseline_q) << '\n';
  }
  return 0;
}

int cmd_validate(const CliOptions& opt) {
  std::vector<double> lambdas = opt.lambdas;
  if (lambdas.empty()) lambdas = {0.1, 0.5, 0.9};
  std::vector<long> omegas;
  for (const auto& text : opt.omegas) omegas.push_back(parse_window(text));
  if (omegas.empty()) omegas = {96, 672};
  const double alpha = opt.alpha;

  std::vector<ValidationCheck> checks;
  bool all_pass = true;

  const auto family_label = [](NullFamily family) {
    return family == NullFamily::Uniform ? "null-uniform" : "null-transformed-normal";
  };

  for (const NullFamily family : {NullFamily::Uniform, NullFamily::TransformedNormal}) {
    for (const long omega : omegas) {
      SyntheticStreamSpec spec;
      spec.kind = StreamKind::NullSymmetric;
      spec.family = family;
      spec.length = opt.length;
      spec.replications = opt.replications;
      spec.seed = opt.seed;
      const auto results = simulate_fwer_grid(spec, lambdas, omega, alpha);
      for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double bound = alpha / 2.0 + 3.0 * results[l].std_error;
        for (const auto& [side, rate] :
             {std::pair<const char*, double>{"pq", results[l].rate_pq},
              std::pair<const char*, double>{"qp", results[l].rate_qp}}) {
          ValidationCheck check;
          check.check = std::string("fwer_") + side;
          check.kind = family_label(family);
          check.lambda = lambdas[l];
          check.omega = omega;
          check.alpha = alpha;
          check.replications = opt.replications;
          check.length = opt.length;
          check.value = rate;
          check.std_error = results[l].std_error;
          check.bound = bound;
          check.pass = rate <= bound;
          all_pass = all_pass && check.pass;
          checks.push_back(check);
        }
        if (results[l].low_replications) {
          std::cerr << "warning: fewer than 100 replications gives the "
                       "false-rejection check little power\n";
        }
      }
    }
  }

  for (const long omega : omegas) {
    SyntheticStreamSpec spec;
    spec.kind = StreamKind::ConstantShift;
    spec.shift = 0.1;
    spec.length = opt.length;
    spec.replications = opt.replications;
    spec.seed = opt.seed + 1;
    std::vector<double> usable;
    for (const double lambda : lambdas) {
      if (lambda > 0.0) usable.push_back(lambda);
    }
    const auto results = simulate_coverage_grid(spec, usable, omega, alpha);
    for (std::size_t l = 0; l < usable.size(); ++l) {
      ValidationCheck check;
      check.check = "coverage";
      check.kind = "constant-shift";
      check.lambda = usable[l];
      check.omega = omega;
      check.alpha = alpha;
      check.shift = spec.shift;
      check.replications = opt.replications;
      check.length = opt.length;
      check.value = results[l].coverage;
      check.std_error = results[l].std_error;
      check.bound = 1.0 - alpha - 3.0 * results[l].std_error;
      check.pass = results[l].coverage >= check.bound;
      all_pass = all_pass && check.pass;
      checks.push_back(check);
    }
  }

  // detection delay, reported but not bounded: no reference value exists
  for (const double shift : {0.2, 0.49}) {
    SyntheticStreamSpec spec;
    spec.kind = StreamKind::ConstantShift;
    spec.shift = shift;
    spec.length = opt.length;
    spec.replications = std::min<long>(opt.replications, 2000);
    spec.seed = opt.seed + 2;
    const PowerResult power = simulate_power(spec, lambdas.back(), omegas.front(), alpha);
    ValidationCheck check;
    check.check = "power_median_delay";
    check.kind = "constant-shift";
    check.lambda = lambdas.back();
    check.omega = omegas.front();
    check.alpha = alpha;
    check.shift = shift;
    check.replications = spec.replications;
    check.length = opt.length;
    check.value = power.median_delay;
    check.std_error = 0.0;
    check.bound = 0.0;
    check.pass = true;
    checks.push_back(check);
  }

  const fs::path dir = output_dir_or(opt, "eselect-out");
  write_validation_report(dir / "validation.csv", checks);

  long failures = 0;
  for (const auto& check : checks) {
    if (!check.pass) ++failures;
  }
  std::cout << "checks " << checks.size() << ", failures " << failures << "\n"
            << "wrote " << (dir / "validation.csv").string() << "\n";
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sequential e-value forecast comparison and fusion"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CliOptions run_opt, sweep_opt, bench_opt, validate_opt;

  CLI::App* run_cmd = app.add_subcommand("run", "evaluate one configuration");
  add_common_options(run_cmd, run_opt, true);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "evaluate a parameter grid");
  add_common_options(sweep_cmd, sweep_opt, true);
  sweep_cmd->add_option("--threads", sweep_opt.threads,
                        "worker threads (0 = hardware)");

  CLI::App* bench_cmd =
      app.add_subcommand("bench", "oracle and baseline average scores");
  bench_cmd->add_option("-i,--input", bench_opt.input, "dataset file")->required();
  bench_cmd->add_option("-o,--output", bench_opt.output, "output directory");
  bench_cmd->add_option("--calibration", bench_opt.calibration,
                        "steps excluded before scoring");
  bench_cmd->set_config("--config", "", "read options from an INI/TOML file");

  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "Monte Carlo certification of the guarantees");
  add_common_options(validate_cmd, validate_opt, false);
  validate_cmd->add_option("--replications", validate_opt.replications,
                           "streams per configuration");
  validate_cmd->add_option("--length", validate_opt.length, "steps per stream");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opt);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opt);
    if (bench_cmd->parsed()) return cmd_bench(bench_opt);
    if (validate_cmd->parsed()) return cmd_validate(validate_opt);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
