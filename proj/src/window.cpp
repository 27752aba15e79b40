#include "eselect/window.hpp"

#include <stdexcept>

namespace eselect {

WindowStats window_stats(std::span<const double> entries) {
  WindowStats stats;
  double mean = 0.0;
  for (const double x : entries) {
    const double d = x - mean;
    stats.var_sum += d * d;
    ++stats.n;
    mean += d / static_cast<double>(stats.n);
    stats.sum += x;
  }
  return stats;
}

WindowScan::WindowScan(long window) : window_(window) {
  if (window < 1) {
    throw std::invalid_argument("window must cover at least one step");
  }
  buffer_.assign(static_cast<std::size_t>(window), 0.0);
  inv_.resize(static_cast<std::size_t>(window) + 1, 0.0);
  for (long j = 1; j <= window; ++j) {
    inv_[static_cast<std::size_t>(j)] = 1.0 / static_cast<double>(j);
  }
}

void WindowScan::reset() {
  size_ = 0;
  next_ = 0;
}

WindowStats WindowScan::push(double bounded_diff) {
  buffer_[next_] = bounded_diff;
  next_ = (next_ + 1) % buffer_.size();
  if (size_ < window_) ++size_;

  // Oldest entry sits at next_ once the ring is full, at 0 otherwise.
  const std::size_t cap = buffer_.size();
  std::size_t idx = (size_ < window_) ? 0 : next_;
  double mean = 0.0;
  double sum = 0.0;
  double var_sum = 0.0;
  const double* inv = inv_.data();
  for (long j = 1; j <= size_; ++j) {
    const double x = buffer_[idx];
    idx = (idx + 1 == cap) ? 0 : idx + 1;
    const double d = x - mean;
    var_sum += d * d;
    mean += d * inv[j];
    sum += x;
  }
  return WindowStats{size_, sum, var_sum};
}

}  // namespace eselect
