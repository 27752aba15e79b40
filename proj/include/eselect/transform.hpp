#pragma once

/**
 * Bounding transform for raw score differences.
 *
 * Raw MAE differences live on an unbounded Watt scale; the sequential
 * evidence machinery needs values in [-1/2, 1/2]. The transform maps
 * x -> Phi(x / sigma) - 1/2 with Phi the standard normal CDF, which is
 * odd, strictly increasing, and approximately linear near zero. The
 * scale sigma is estimated once from an initial calibration stretch of
 * raw differences and is immutable afterwards.
 */

#include <span>

namespace eselect {

/// Standard normal CDF. Absolute error below 1e-12 for |z| <= 8.
double normal_cdf(double z) noexcept;

/// Inverse of normal_cdf on (0, 1). Bracketed Newton iteration on the CDF.
double normal_quantile(double p);

struct TransformSpec {
  double sigma = 1.0;            ///< scale parameter, Watts (> 0)
  long calibration_length = 0;   ///< steps consumed to estimate sigma
};

/// Estimates sigma as the sample standard deviation (divisor n-1) of the
/// first `calibration_length` raw differences. Those steps are consumed by
/// calibration and take no part in any later selection statistics.
///
/// Throws DataError if fewer entries are available and
/// DegenerateScaleError if the calibration stretch has zero variance.
TransformSpec calibrate_scale(std::span<const double> raw_diffs,
                              long calibration_length);

/// Maps a raw difference (Watts) into (-1/2, 1/2).
/// Saturates at +/-(1/2 - 2^-54) so the output always back-transforms.
double bound_diff(double x_watts, const TransformSpec& spec);

/// Exact inverse of bound_diff: sigma * Phi^{-1}(b + 1/2).
/// Throws std::domain_error when |b| >= 1/2.
double unbound_diff(double bounded, const TransformSpec& spec);

}  // namespace eselect
