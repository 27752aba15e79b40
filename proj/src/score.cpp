#include "eselect/score.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "eselect/errors.hpp"

namespace eselect {

void ForecastTriple::validate() const {
  if (p.empty() || p.size() != q.size() || p.size() != y.size()) {
    throw DataError("step " + std::to_string(step) +
                    ": forecast and outcome horizons must share a length >= 1");
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!std::isfinite(p[k]) || !std::isfinite(q[k]) || !std::isfinite(y[k])) {
      throw DataError("step " + std::to_string(step) + ": non-finite entry at horizon " +
                      std::to_string(k + 1));
    }
  }
}

double mae(std::span<const double> forecast, std::span<const double> outcome) {
  if (forecast.empty() || forecast.size() != outcome.size()) {
    throw DataError("mae requires equally sized, non-empty horizon vectors");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < forecast.size(); ++k) {
    const double d = forecast[k] - outcome[k];
    if (!std::isfinite(d)) {
      throw DataError("mae encountered a non-finite entry at horizon " +
                      std::to_string(k + 1));
    }
    sum += std::fabs(d);
  }
  return sum / static_cast<double>(forecast.size());
}

double score_difference(const ForecastTriple& triple) {
  triple.validate();
  return mae(triple.p, triple.y) - mae(triple.q, triple.y);
}

std::optional<double> rolling_average(std::span<const double> values,
                                      std::size_t t, long window) {
  if (window < 1) {
    throw std::invalid_argument("rolling window must cover at least one step");
  }
  if (t > values.size()) {
    throw std::invalid_argument("step beyond the end of the sequence");
  }
  if (std::cmp_less(t, window)) {
    return std::nullopt;  // insufficient history; caller must wait
  }
  double sum = 0.0;
  for (std::size_t i = t - static_cast<std::size_t>(window); i < t; ++i) {
    sum += values[i];
  }
  return sum / static_cast<double>(window);
}

RollingMean::RollingMean(long window) : window_(window) {
  if (window < 1) {
    throw std::invalid_argument("rolling window must cover at least one step");
  }
  buffer_.assign(static_cast<std::size_t>(window), 0.0);
}

void RollingMean::add(double value) {
  // Neumaier-compensated accumulation keeps the sliding sum from drifting.
  const double t = sum_ + value;
  if (std::fabs(sum_) >= std::fabs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

void RollingMean::push(double value) {
  if (count_ >= window_) {
    add(-buffer_[head_]);
  }
  buffer_[head_] = value;
  head_ = (head_ + 1) % buffer_.size();
  add(value);
  if (count_ < window_) ++count_;
}

void RollingMean::reset() {
  count_ = 0;
  head_ = 0;
  sum_ = 0.0;
  compensation_ = 0.0;
}

std::optional<double> RollingMean::mean() const {
  if (!full()) return std::nullopt;
  return (sum_ + compensation_) / static_cast<double>(window_);
}

double RollingMean::partial_mean() const {
  if (count_ < 1) {
    throw std::logic_error("rolling mean queried before any observation");
  }
  return (sum_ + compensation_) / static_cast<double>(count_);
}

}  // namespace eselect
