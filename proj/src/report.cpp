#include "eselect/report.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "eselect/errors.hpp"
#include "eselect/version.hpp"

namespace eselect {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw DataError("write failed for " + path.string());
  }
}

std::string bool_cell(bool value) { return value ? "1" : "0"; }

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_step_records(const std::filesystem::path& path, const RunResult& run) {
  auto out = open_for_write(path);
  out << "step,raw_diff_w,bounded_diff,window_n,window_full,window_mean,"
         "log_e_pq,log_e_qp,reject_pq,reject_qp,p_value_pq,p_value_qp,"
         "band_lower,band_upper,band_lower_w,band_upper_w,"
         "status,source,w_p,w_q,basis_step,fused_mae_w,mae_p_w,mae_q_w\n";
  for (const StepRecord& rec : run.records) {
    out << rec.step << ',' << format_double(rec.raw_diff) << ','
        << format_double(rec.bounded_diff) << ',' << rec.window_n << ','
        << bool_cell(rec.window_full) << ',' << format_double(rec.window_mean)
        << ',' << format_double(rec.log_e_pq) << ','
        << format_double(rec.log_e_qp) << ',' << bool_cell(rec.verdict.reject_pq)
        << ',' << bool_cell(rec.verdict.reject_qp) << ','
        << format_double(rec.verdict.p_value_pq) << ','
        << format_double(rec.verdict.p_value_qp) << ',';
    if (rec.band) {
      out << format_double(rec.band->lower) << ',' << format_double(rec.band->upper)
          << ',';
      out << (rec.band->lower_watts ? format_double(*rec.band->lower_watts) : "")
          << ',';
      out << (rec.band->upper_watts ? format_double(*rec.band->upper_watts) : "")
          << ',';
    } else {
      out << ",,,,";
    }
    const bool decided = rec.decision.source != Source::Warmup;
    out << (decided ? "DECIDED" : "WARMUP") << ','
        << source_name(rec.decision.source) << ',';
    if (decided) {
      out << format_double(rec.decision.w_p) << ','
          << format_double(rec.decision.w_q) << ',' << rec.decision.basis_step
          << ',' << format_double(*rec.fused_mae) << ',';
    } else {
      out << ",,,,";
    }
    out << format_double(rec.mae_p) << ',' << format_double(rec.mae_q) << '\n';
  }
  close_checked(out, path);
}

void write_sweep_table(const std::filesystem::path& path, const SweepResult& sweep) {
  auto out = open_for_write(path);
  out << "omega_steps,omega,lambda,strategy,excluded,decided_steps,"
         "avg_fused_w,avg_p_w,avg_q_w,avg_oracle_w,"
         "dev_vs_p_w,dev_vs_q_w,dev_vs_better_w,"
         "discrete_steps,better_steps,fraction_better\n";
  for (const SweepCell& cell : sweep.cells) {
    const RunSummary& s = cell.summary;
    const double better = std::min(s.avg_p, s.avg_q);
    out << cell.omega << ',' << window_label(cell.omega) << ','
        << format_double(cell.lambda) << ',' << strategy_name(cell.strategy)
        << ',' << bool_cell(s.excluded) << ',' << s.decided_steps << ','
        << format_double(s.avg_fused) << ',' << format_double(s.avg_p) << ','
        << format_double(s.avg_q) << ',' << format_double(s.avg_oracle) << ','
        << format_double(s.avg_p - s.avg_fused) << ','
        << format_double(s.avg_q - s.avg_fused) << ','
        << format_double(better - s.avg_fused) << ',' << s.discrete_steps << ','
        << s.better_steps << ',';
    const auto fraction = s.fraction_better();
    out << (fraction ? format_double(*fraction) : "") << '\n';
  }
  close_checked(out, path);
}

void write_heatmap(const std::filesystem::path& path, const SweepResult& sweep,
                   Strategy strategy) {
  auto out = open_for_write(path);
  out << "omega";
  for (const double lambda : sweep.lambdas) {
    out << ',' << format_double(lambda);
  }
  out << '\n';
  for (const long omega : sweep.omegas) {
    out << window_label(omega);
    for (const double lambda : sweep.lambdas) {
      out << ',';
      for (const SweepCell& cell : sweep.cells) {
        if (cell.omega == omega && cell.lambda == lambda &&
            cell.strategy == strategy) {
          if (!cell.summary.excluded) {
            const double better = std::min(cell.summary.avg_p, cell.summary.avg_q);
            out << format_double(better - cell.summary.avg_fused);
          }
          break;
        }
      }
    }
    out << '\n';
  }
  close_checked(out, path);
}

void write_timings(const std::filesystem::path& path, const SweepResult& sweep) {
  auto out = open_for_write(path);
  out << "omega_steps,lambda,strategy,seconds\n";
  for (std::size_t w = 0; w < sweep.omegas.size(); ++w) {
    out << sweep.omegas[w] << ",,window_scan,"
        << format_double(sweep.scan_seconds[w]) << '\n';
  }
  for (const SweepCell& cell : sweep.cells) {
    out << cell.omega << ',' << format_double(cell.lambda) << ','
        << strategy_name(cell.strategy) << ','
        << format_double(cell.runtime_seconds) << '\n';
  }
  close_checked(out, path);
}

void write_validation_report(const std::filesystem::path& path,
                             const std::vector<ValidationCheck>& checks) {
  auto out = open_for_write(path);
  out << "check,kind,lambda,omega,alpha,shift,replications,length,"
         "value,std_error,bound,pass\n";
  for (const ValidationCheck& c : checks) {
    out << c.check << ',' << c.kind << ',' << format_double(c.lambda) << ','
        << c.omega << ',' << format_double(c.alpha) << ','
        << format_double(c.shift) << ',' << c.replications << ',' << c.length
        << ',' << format_double(c.value) << ',' << format_double(c.std_error)
        << ',' << format_double(c.bound) << ',' << bool_cell(c.pass) << '\n';
  }
  close_checked(out, path);
}

void write_run_metadata(const std::filesystem::path& path,
                        const RunConfig& config, const RunSummary* summary,
                        double max_shift_mismatch) {
  nlohmann::ordered_json doc;
  doc["tool"] = "eselect";
  doc["version"] = kVersion;

  nlohmann::ordered_json cfg;
  cfg["input"] = config.input_path;
  cfg["alpha"] = config.alpha;
  cfg["lambda"] = config.lambdas;
  nlohmann::ordered_json omegas = nlohmann::ordered_json::array();
  for (const long omega : config.omegas) omegas.push_back(window_label(omega));
  cfg["omega"] = omegas;
  cfg["omega_steps"] = config.omegas;
  nlohmann::ordered_json strategies = nlohmann::ordered_json::array();
  for (const Strategy s : config.strategies) strategies.push_back(strategy_name(s));
  cfg["strategy"] = strategies;
  cfg["lag"] = config.lag;
  cfg["calibration_length"] = config.calibration_length;
  cfg["seed"] = config.seed;
  cfg["initial_arm"] = source_name(config.initial_arm);
  doc["config"] = cfg;

  doc["input_shift_mismatch_w"] = max_shift_mismatch;

  if (summary != nullptr) {
    nlohmann::ordered_json s;
    s["total_steps"] = summary->total_steps;
    s["horizon"] = summary->horizon;
    s["calibration_steps"] = summary->calibration_steps;
    s["selection_steps"] = summary->selection_steps;
    s["warmup_steps"] = summary->warmup_steps;
    s["decided_steps"] = summary->decided_steps;
    s["first_decided_step"] = summary->first_decided_step;
    s["sigma_w"] = summary->sigma;
    s["degenerate_scale"] = summary->degenerate_scale;
    s["avg_fused_w"] = summary->avg_fused;
    s["avg_p_w"] = summary->avg_p;
    s["avg_q_w"] = summary->avg_q;
    s["avg_oracle_w"] = summary->avg_oracle;
    s["discrete_steps"] = summary->discrete_steps;
    s["better_steps"] = summary->better_steps;
    const auto fraction = summary->fraction_better();
    if (fraction) {
      s["fraction_better"] = *fraction;
    } else {
      s["fraction_better"] = nullptr;
    }
    s["double_rejections"] = summary->double_rejections;
    s["excluded"] = summary->excluded;
    s["exclusion_horizon_steps"] = summary->exclusion_horizon;
    doc["summary"] = s;
  }

  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
  close_checked(out, path);
}

}  // namespace eselect
