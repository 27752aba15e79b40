#include "eselect/transform.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "eselect/errors.hpp"

namespace eselect {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

void check_spec(const TransformSpec& spec) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) {
    throw std::invalid_argument("transform scale must be a positive finite number");
  }
}

double normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) * kInvSqrt2Pi;
}

/// Solves Phi(z) - 1/2 = target for target in [0, 1/2) via Newton steps
/// safeguarded by a bisection bracket. Converges to machine precision.
double centered_quantile(double target) {
  if (target == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 9.5;  // 0.5*erf(9.5/sqrt(2)) == 0.5 in double arithmetic
  double z = std::min(target * kSqrt2Pi, 1.0);
  for (int it = 0; it < 200; ++it) {
    const double g = 0.5 * std::erf(z * kInvSqrt2) - target;
    if (g > 0.0) {
      hi = z;
    } else if (g < 0.0) {
      lo = z;
    } else {
      return z;
    }
    double next = z - g / normal_pdf(z);
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = 0.5 * (lo + hi);
    }
    if (std::fabs(next - z) <= 4.0 * DBL_EPSILON * std::fabs(next)) {
      return next;
    }
    z = next;
  }
  return z;
}

}  // namespace

double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("normal_quantile requires p in (0, 1)");
  }
  const double centered = p - 0.5;
  const double z = centered_quantile(std::fabs(centered));
  return std::copysign(z, centered);
}

TransformSpec calibrate_scale(std::span<const double> raw_diffs,
                              long calibration_length) {
  if (calibration_length < 2) {
    throw std::invalid_argument(
        "calibration length must be at least 2 to estimate a standard deviation");
  }
  if (std::cmp_less(raw_diffs.size(), calibration_length)) {
    throw DataError("calibration needs " + std::to_string(calibration_length) +
                    " score differences, only " + std::to_string(raw_diffs.size()) +
                    " available");
  }
  const auto n = static_cast<std::size_t>(calibration_length);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(raw_diffs[i])) {
      throw DataError("non-finite score difference in calibration window");
    }
    mean += raw_diffs[i];
  }
  mean /= static_cast<double>(n);
  double ssd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = raw_diffs[i] - mean;
    ssd += d * d;
  }
  const double sigma = std::sqrt(ssd / static_cast<double>(n - 1));
  if (!(sigma > 0.0)) {
    throw DegenerateScaleError(
        "calibration window has zero variance; scale is undefined");
  }
  return TransformSpec{sigma, calibration_length};
}

double bound_diff(double x_watts, const TransformSpec& spec) {
  check_spec(spec);
  if (!std::isfinite(x_watts)) {
    throw DataError("cannot transform a non-finite score difference");
  }
  // Phi(z) - 1/2 == erf(z/sqrt(2))/2, evaluated without cancellation near 0.
  const double b = 0.5 * std::erf((x_watts / spec.sigma) * kInvSqrt2);
  // Saturate just inside the open interval so the result always back-transforms.
  const double half_open = std::nextafter(0.5, 0.0);
  return std::clamp(b, -half_open, half_open);
}

double unbound_diff(double bounded, const TransformSpec& spec) {
  check_spec(spec);
  if (!(std::fabs(bounded) < 0.5)) {
    throw std::domain_error("bounded difference must lie strictly inside (-1/2, 1/2)");
  }
  const double z = centered_quantile(std::fabs(bounded));
  return std::copysign(z * spec.sigma, bounded);
}

}  // namespace eselect
