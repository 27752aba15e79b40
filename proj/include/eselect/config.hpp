#pragma once

/**
 * Run configuration shared by the CLI, the sweep, and the bindings.
 *
 * Windows are counted in 15-minute steps; the text forms "1h" (= 4 steps)
 * and "7d" (= 672 steps) are accepted wherever a window is configured.
 * The decision lag defaults to one day (96 steps).
 */

#include <cstdint>
#include <string>
#include <vector>

#include "eselect/selection.hpp"

namespace eselect {

struct RunConfig {
  std::string input_path;
  std::string output_dir;
  double alpha = 0.05;
  std::vector<double> lambdas = {0.1};
  std::vector<long> omegas = {672};
  std::vector<Strategy> strategies = {Strategy::Persistence};
  long lag = 96;
  long calibration_length = 672;
  std::uint64_t seed = 1;
  Source initial_arm = Source::P;

  /// Throws ConfigError on out-of-range fields or empty grids.
  void validate() const;
};

/// Parses "4", "1h" (4 steps), or "7d" (672 steps). Exact arithmetic; no
/// rounding is ever involved.
long parse_window(const std::string& text);

/// Canonical text form for a window: whole days as "Nd", whole hours as
/// "Nh", otherwise the raw step count.
std::string window_label(long steps);

Strategy parse_strategy(const std::string& text);
std::string strategy_name(Strategy strategy);

Source parse_arm(const std::string& text);
std::string source_name(Source source);

/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_lambda_grid();

/// {1h, 2h} plus 1..14 whole days.
std::vector<long> default_omega_grid();

}  // namespace eselect
