#pragma once

/**
 * Per-step scoring of two competing horizon forecasts.
 *
 * Each step carries two forecast vectors (P and Q) over the same horizon
 * plus the realized outcomes. Both forecasts are scored with the mean
 * absolute error; the raw score difference mae(P) - mae(Q) is the single
 * number the rest of the pipeline consumes. Negative differences favor P.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eselect {

/// One ingestion unit: a step index, both forecast horizon vectors and the
/// realized outcomes, all of identical length H >= 1, in Watts.
struct ForecastTriple {
  std::int64_t step = 0;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> y;

  /// Throws DataError unless all three vectors share a length >= 1 and
  /// every entry is finite.
  void validate() const;
};

/// Mean absolute error over a forecast horizon: (1/H) * sum |f_k - y_k|.
double mae(std::span<const double> forecast, std::span<const double> outcome);

/// Raw score difference mae(p, y) - mae(q, y), Watts. Negative favors P.
double score_difference(const ForecastTriple& triple);

/// Mean of values[t-window .. t-1] (the window of `window` entries ending at
/// 1-based step t). Disengaged while fewer than `window` entries exist.
std::optional<double> rolling_average(std::span<const double> values,
                                      std::size_t t, long window);

/// Streaming fixed-window mean with a compensated sliding sum, so that the
/// incremental value tracks a fresh batch recomputation.
class RollingMean {
 public:
  explicit RollingMean(long window);

  void push(double value);
  void reset();

  long window() const { return window_; }
  long count() const { return count_; }
  bool full() const { return count_ >= window_; }

  /// Engaged once a full window of observations has been seen.
  std::optional<double> mean() const;

  /// Mean over whatever is present; requires count() >= 1.
  double partial_mean() const;

 private:
  void add(double value);

  long window_ = 0;
  long count_ = 0;
  std::size_t head_ = 0;
  double sum_ = 0.0;
  double compensation_ = 0.0;
  std::vector<double> buffer_;
};

/// The evidence stream derived from a run: raw and transformed differences
/// plus the full-window rolling mean (NaN while the window is incomplete).
struct ScoreStream {
  std::vector<double> raw;          ///< score differences, Watts
  std::vector<double> bounded;      ///< transformed differences in [-1/2, 1/2]
  std::vector<double> window_mean;  ///< rolling mean, NaN for the first window-1 steps
  long window = 0;
};

}  // namespace eselect
