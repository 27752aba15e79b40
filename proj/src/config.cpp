#include "eselect/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "eselect/errors.hpp"

namespace eselect {

namespace {

constexpr long kStepsPerHour = 4;   // 15-minute resolution
constexpr long kStepsPerDay = 96;

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  if (lambdas.empty()) throw ConfigError("at least one lambda required");
  for (const double lambda : lambdas) {
    if (!(lambda >= 0.0) || !(lambda < 1.0)) {
      throw ConfigError("lambda must lie in [0, 1)");
    }
  }
  if (omegas.empty()) throw ConfigError("at least one window required");
  for (const long omega : omegas) {
    if (omega < 1) throw ConfigError("window must cover at least one step");
  }
  if (strategies.empty()) throw ConfigError("at least one strategy required");
  if (lag < 1) throw ConfigError("decision lag must be at least one step");
  if (calibration_length < 2) {
    throw ConfigError("calibration needs at least two steps");
  }
  if (initial_arm != Source::P && initial_arm != Source::Q) {
    throw ConfigError("initial arm must be P or Q");
  }
}

long parse_window(const std::string& text) {
  if (text.empty()) throw ConfigError("empty window value");
  std::string body = text;
  long unit = 1;
  const char suffix = static_cast<char>(
      std::tolower(static_cast<unsigned char>(body.back())));
  if (suffix == 'h' || suffix == 'd') {
    unit = suffix == 'h' ? kStepsPerHour : kStepsPerDay;
    body.pop_back();
  }
  long count = 0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), count);
  if (ec != std::errc{} || ptr != body.data() + body.size() || count < 1) {
    throw ConfigError("cannot parse window '" + text +
                      "' (use a step count or e.g. 1h, 7d)");
  }
  return count * unit;
}

std::string window_label(long steps) {
  if (steps % kStepsPerDay == 0) {
    return std::to_string(steps / kStepsPerDay) + "d";
  }
  if (steps % kStepsPerHour == 0) {
    return std::to_string(steps / kStepsPerHour) + "h";
  }
  return std::to_string(steps);
}

Strategy parse_strategy(const std::string& text) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "persistence") return Strategy::Persistence;
  if (s == "sampling") return Strategy::Sampling;
  if (s == "wavg" || s == "weighted-average" || s == "weighted_average") {
    return Strategy::WeightedAverage;
  }
  throw ConfigError("unknown strategy '" + text +
                    "' (expected persistence, sampling, or wavg)");
}

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::Persistence: return "persistence";
    case Strategy::Sampling: return "sampling";
    case Strategy::WeightedAverage: return "wavg";
  }
  return "?";
}

Source parse_arm(const std::string& text) {
  if (text == "P" || text == "p") return Source::P;
  if (text == "Q" || text == "q") return Source::Q;
  throw ConfigError("initial arm must be P or Q, got '" + text + "'");
}

std::string source_name(Source source) {
  switch (source) {
    case Source::P: return "P";
    case Source::Q: return "Q";
    case Source::Fused: return "FUSED";
    case Source::Warmup: return "WARMUP";
  }
  return "?";
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  grid.reserve(99);
  for (int i = 1; i <= 99; ++i) {
    grid.push_back(static_cast<double>(i) / 100.0);
  }
  return grid;
}

std::vector<long> default_omega_grid() {
  std::vector<long> grid = {1 * kStepsPerHour, 2 * kStepsPerHour};
  for (long d = 1; d <= 14; ++d) {
    grid.push_back(d * kStepsPerDay);
  }
  return grid;
}

}  // namespace eselect
