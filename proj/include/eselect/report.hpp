#pragma once

/**
 * File emission for runs, sweeps, and validation.
 *
 * Every writer produces byte-identical output for identical inputs:
 * doubles are rendered with shortest round-trip formatting, keys are
 * ordered, and nothing time- or locale-dependent enters the deterministic
 * files. Wall-clock timings go to a separate file excluded from that
 * contract.
 */

#include <filesystem>
#include <string>
#include <vector>

#include "eselect/run.hpp"
#include "eselect/synthetic.hpp"

namespace eselect {

/// One validation assertion outcome for the machine-readable report.
struct ValidationCheck {
  std::string check;    // "fwer" | "coverage" | "power"
  std::string kind;     // stream kind / family label
  double lambda = 0.0;
  long omega = 0;
  double alpha = 0.0;
  double shift = 0.0;
  long replications = 0;
  long length = 0;
  double value = 0.0;      // measured rate / coverage / median delay
  double std_error = 0.0;
  double bound = 0.0;      // threshold the value is held against
  bool pass = true;
};

/// Shortest round-trip decimal form of a double (deterministic).
std::string format_double(double value);

void write_step_records(const std::filesystem::path& path, const RunResult& run);
void write_sweep_table(const std::filesystem::path& path, const SweepResult& sweep);
/// One deviation matrix (omega rows x lambda columns) per strategy;
/// positive cells mean the fused forecast beat the better baseline.
void write_heatmap(const std::filesystem::path& path, const SweepResult& sweep,
                   Strategy strategy);
void write_timings(const std::filesystem::path& path, const SweepResult& sweep);
void write_validation_report(const std::filesystem::path& path,
                             const std::vector<ValidationCheck>& checks);

/// Run metadata: configuration echo, seed, scale, counts, versions.
void write_run_metadata(const std::filesystem::path& path,
                        const RunConfig& config, const RunSummary* summary,
                        double max_shift_mismatch);

}  // namespace eselect
