#pragma once

/**
 * Per-step rolling-window statistics for the evidence engine.
 *
 * At step t the engine looks at the most recent `window` transformed
 * differences (all of them while fewer exist). Because the variance
 * process inside a window depends on the window-local running means,
 * sliding the window by one step reshuffles every term; each step is
 * therefore recomputed from a ring buffer in O(window).
 */

#include <span>
#include <vector>

namespace eselect {

/// Summary of one window: observation count, plain sum, and the variance
/// process sum((x_j - m_{j-1})^2) with m_0 = 0 and m_j the running mean of
/// the window entries seen so far.
struct WindowStats {
  long n = 0;
  double sum = 0.0;
  double var_sum = 0.0;

  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
};

/// Computes the statistics of a single window given its entries in order.
WindowStats window_stats(std::span<const double> entries);

/// Streaming scanner: push one transformed difference per step and get the
/// statistics of the window ending at that step.
class WindowScan {
 public:
  explicit WindowScan(long window);

  WindowStats push(double bounded_diff);
  void reset();

  long window() const { return window_; }
  long count() const { return size_; }

 private:
  long window_ = 0;
  long size_ = 0;        // entries currently buffered (<= window_)
  std::size_t next_ = 0; // ring insert position
  std::vector<double> buffer_;
  std::vector<double> inv_;  // 1/j lookup, index 1..window
};

}  // namespace eselect
