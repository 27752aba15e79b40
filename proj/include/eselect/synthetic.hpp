#pragma once

/**
 * Monte Carlo certification of the sequential guarantees.
 *
 * The familywise error bound and the time-uniform coverage statement are
 * exactly the properties a deployment relies on, so this module replays the
 * deployed rolling-window procedure on synthetic streams with known truth
 * and measures crossing rates, coverage, and detection delay. Replications
 * are seeded individually from the master seed and are order-independent;
 * results are bit-reproducible for a fixed spec.
 */

#include <cstdint>
#include <span>
#include <vector>

namespace eselect {

enum class StreamKind { NullSymmetric, ConstantShift, RegimeSwitch };

/// Distribution family for the symmetric null generator. Uniform draws
/// cover the full [-1/2, 1/2] range; TransformedNormal pushes normal noise
/// through the engine's own bounding transform so the null also runs on the
/// kind of concentrated stream the transform produces in production.
enum class NullFamily { Uniform, TransformedNormal };

struct SyntheticStreamSpec {
  StreamKind kind = StreamKind::NullSymmetric;
  NullFamily family = NullFamily::Uniform;
  double shift = 0.0;                    ///< mean of the bounded diffs, |shift| < 1/2
  std::vector<long> switch_points;       ///< regime starts, strictly increasing in [1, length]
  long length = 1000;                    ///< steps per stream
  long replications = 10000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Fills `out` with one replication's stream of transformed differences,
/// all within [-1/2, 1/2]. When `true_means` is given it receives the
/// per-step conditional means.
void generate_stream(const SyntheticStreamSpec& spec, std::uint64_t replication,
                     std::vector<double>& out,
                     std::vector<double>* true_means = nullptr);

struct FwerResult {
  double rate_pq = 0.0;      ///< fraction of streams where E ever crossed 2/alpha
  double rate_qp = 0.0;
  double rate_either = 0.0;
  double std_error = 0.0;    ///< binomial SE at the alpha/2 bound
  long replications = 0;
  bool low_replications = false;  ///< fewer than 100 replications: low power
};

/// Crossing rate of either e-process over every window the deployed engine
/// would evaluate. Requires a conditionally mean-zero stream spec.
FwerResult simulate_fwer(const SyntheticStreamSpec& spec, double lambda,
                         long omega, double alpha);

/// Same streams checked against several lambdas in one pass.
std::vector<FwerResult> simulate_fwer_grid(const SyntheticStreamSpec& spec,
                                           std::span<const double> lambdas,
                                           long omega, double alpha);

struct CoverageResult {
  double coverage = 0.0;   ///< fraction of streams covered at every step
  double std_error = 0.0;  ///< binomial SE at the 1-alpha bound
  long replications = 0;
  bool low_replications = false;
};

/// Simultaneous coverage of the confidence band over the true window-average
/// differential. Requires a stream kind with known means.
CoverageResult simulate_coverage(const SyntheticStreamSpec& spec, double lambda,
                                 long omega, double alpha);

std::vector<CoverageResult> simulate_coverage_grid(
    const SyntheticStreamSpec& spec, std::span<const double> lambdas,
    long omega, double alpha);

struct PowerResult {
  double median_delay = 0.0;      ///< steps to first correct crossing; inf if never
  double crossed_fraction = 0.0;  ///< replications with a crossing at all
  long replications = 0;
  bool low_replications = false;
};

/// Median first-crossing step of the correctly oriented e-process on a
/// shifted stream. Requires ConstantShift with shift != 0.
PowerResult simulate_power(const SyntheticStreamSpec& spec, double lambda,
                           long omega, double alpha);

}  // namespace eselect
