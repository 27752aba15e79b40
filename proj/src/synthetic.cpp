#include "eselect/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "eselect/eprocess.hpp"
#include "eselect/rng.hpp"
#include "eselect/selection.hpp"
#include "eselect/transform.hpp"
#include "eselect/window.hpp"

namespace eselect {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

// Scale mismatch between the normal noise (sd 1) and the transform used to
// bound it; with matched scales the output would be exactly uniform again.
constexpr double kNullTransformScale = 2.0;

double standard_normal(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(kTwoPi * u2);
}

void check_params(double lambda, long omega, double alpha) {
  if (!(lambda >= 0.0) || !(lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1)");
  }
  if (omega < 1) {
    throw std::invalid_argument("window must cover at least one step");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
}

bool is_null_spec(const SyntheticStreamSpec& spec) {
  if (spec.kind == StreamKind::NullSymmetric) return true;
  // Regime switches with zero mean are still a valid (non-iid) null.
  return spec.kind == StreamKind::RegimeSwitch && spec.shift == 0.0;
}

double binomial_se(double p, long n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

void SyntheticStreamSpec::validate() const {
  if (length < 1) throw std::invalid_argument("stream length must be positive");
  if (replications < 1) {
    throw std::invalid_argument("at least one replication required");
  }
  if (!(std::fabs(shift) < 0.5)) {
    throw std::invalid_argument("shift must lie strictly inside (-1/2, 1/2)");
  }
  long prev = 0;
  for (const long s : switch_points) {
    if (s <= prev || s > length) {
      throw std::invalid_argument(
          "switch points must be strictly increasing within [1, length]");
    }
    prev = s;
  }
}

void generate_stream(const SyntheticStreamSpec& spec, std::uint64_t replication,
                     std::vector<double>& out, std::vector<double>* true_means) {
  spec.validate();
  out.resize(static_cast<std::size_t>(spec.length));
  if (true_means != nullptr) {
    true_means->resize(out.size());
  }
  std::mt19937_64 rng(derive_seed(spec.seed, replication));

  switch (spec.kind) {
    case StreamKind::NullSymmetric: {
      if (spec.family == NullFamily::Uniform) {
        for (std::size_t i = 0; i < out.size(); ++i) {
          out[i] = uniform01(rng) - 0.5;
        }
      } else {
        const TransformSpec bounder{kNullTransformScale, 0};
        for (std::size_t i = 0; i < out.size(); ++i) {
          out[i] = bound_diff(standard_normal(rng), bounder);
        }
      }
      if (true_means != nullptr) {
        std::fill(true_means->begin(), true_means->end(), 0.0);
      }
      return;
    }
    case StreamKind::ConstantShift: {
      const double width = 0.5 - std::fabs(spec.shift);
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = spec.shift + (2.0 * uniform01(rng) - 1.0) * width;
        if (true_means != nullptr) (*true_means)[i] = spec.shift;
      }
      return;
    }
    case StreamKind::RegimeSwitch: {
      // Regimes alternate a sign-flipped mean and a halved spread, starting
      // from +shift; with shift = 0 only the spread changes (zero-mean null).
      const double base_width = 0.5 - std::fabs(spec.shift);
      std::size_t next_switch = 0;
      long regime = 0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const long step = static_cast<long>(i) + 1;
        while (next_switch < spec.switch_points.size() &&
               spec.switch_points[next_switch] <= step) {
          ++next_switch;
          ++regime;
        }
        const double mean = (regime % 2 == 0) ? spec.shift : -spec.shift;
        const double width = (regime % 2 == 0) ? base_width : 0.5 * base_width;
        out[i] = mean + (2.0 * uniform01(rng) - 1.0) * width;
        if (true_means != nullptr) (*true_means)[i] = mean;
      }
      return;
    }
  }
  throw std::logic_error("unknown stream kind");
}

std::vector<FwerResult> simulate_fwer_grid(const SyntheticStreamSpec& spec,
                                           std::span<const double> lambdas,
                                           long omega, double alpha) {
  spec.validate();
  if (!is_null_spec(spec)) {
    throw std::invalid_argument(
        "false-rejection rates need a conditionally mean-zero stream");
  }
  for (const double lambda : lambdas) check_params(lambda, omega, alpha);
  if (lambdas.empty()) return {};

  const double threshold = rejection_log_threshold(alpha);
  const std::size_t n_lambda = lambdas.size();
  std::vector<double> psi(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    psi[l] = psi_sub_exponential(lambdas[l]);
  }

  std::vector<long> crossed_pq(n_lambda, 0);
  std::vector<long> crossed_qp(n_lambda, 0);
  std::vector<long> crossed_either(n_lambda, 0);
  std::vector<double> stream;
  std::vector<char> hit_pq(n_lambda), hit_qp(n_lambda);
  WindowScan scan(omega);

  for (long rep = 0; rep < spec.replications; ++rep) {
    generate_stream(spec, static_cast<std::uint64_t>(rep), stream);
    scan.reset();
    std::fill(hit_pq.begin(), hit_pq.end(), 0);
    std::fill(hit_qp.begin(), hit_qp.end(), 0);
    for (const double x : stream) {
      const WindowStats st = scan.push(x);
      for (std::size_t l = 0; l < n_lambda; ++l) {
        const double drift = lambdas[l] * st.sum;
        const double decay = psi[l] * st.var_sum + threshold;
        if (drift >= decay) hit_pq[l] = 1;
        if (-drift >= decay) hit_qp[l] = 1;
      }
    }
    for (std::size_t l = 0; l < n_lambda; ++l) {
      crossed_pq[l] += hit_pq[l];
      crossed_qp[l] += hit_qp[l];
      crossed_either[l] += (hit_pq[l] || hit_qp[l]) ? 1 : 0;
    }
  }

  const double reps = static_cast<double>(spec.replications);
  std::vector<FwerResult> results(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    results[l].rate_pq = static_cast<double>(crossed_pq[l]) / reps;
    results[l].rate_qp = static_cast<double>(crossed_qp[l]) / reps;
    results[l].rate_either = static_cast<double>(crossed_either[l]) / reps;
    results[l].std_error = binomial_se(alpha / 2.0, spec.replications);
    results[l].replications = spec.replications;
    results[l].low_replications = spec.replications < 100;
  }
  return results;
}

FwerResult simulate_fwer(const SyntheticStreamSpec& spec, double lambda,
                         long omega, double alpha) {
  const double lambdas[1] = {lambda};
  return simulate_fwer_grid(spec, lambdas, omega, alpha).front();
}

std::vector<CoverageResult> simulate_coverage_grid(
    const SyntheticStreamSpec& spec, std::span<const double> lambdas,
    long omega, double alpha) {
  spec.validate();
  if (spec.kind == StreamKind::NullSymmetric && spec.shift != 0.0) {
    throw std::invalid_argument("symmetric null streams have mean zero");
  }
  for (const double lambda : lambdas) {
    check_params(lambda, omega, alpha);
    if (lambda == 0.0) {
      throw std::invalid_argument("coverage bands are undefined for lambda = 0");
    }
  }
  if (lambdas.empty()) return {};

  const double log_tail = std::log(alpha / 2.0);
  const std::size_t n_lambda = lambdas.size();
  std::vector<double> psi(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    psi[l] = psi_sub_exponential(lambdas[l]);
  }

  std::vector<long> covered(n_lambda, 0);
  std::vector<double> stream, means, mean_prefix;
  std::vector<char> ok(n_lambda);
  WindowScan scan(omega);

  for (long rep = 0; rep < spec.replications; ++rep) {
    generate_stream(spec, static_cast<std::uint64_t>(rep), stream, &means);
    scan.reset();
    mean_prefix.assign(stream.size() + 1, 0.0);
    for (std::size_t i = 0; i < means.size(); ++i) {
      mean_prefix[i + 1] = mean_prefix[i] + means[i];
    }
    std::fill(ok.begin(), ok.end(), 1);
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const WindowStats st = scan.push(stream[i]);
      const double inv_n = 1.0 / static_cast<double>(st.n);
      const double center = st.sum * inv_n;
      const double true_mean =
          (mean_prefix[i + 1] - mean_prefix[i + 1 - static_cast<std::size_t>(st.n)]) *
          inv_n;
      const double gap = std::fabs(center - true_mean);
      for (std::size_t l = 0; l < n_lambda; ++l) {
        if (!ok[l]) continue;
        const double half =
            (psi[l] * st.var_sum - log_tail) / lambdas[l] * inv_n;
        if (gap > half) ok[l] = 0;
      }
    }
    for (std::size_t l = 0; l < n_lambda; ++l) covered[l] += ok[l];
  }

  const double reps = static_cast<double>(spec.replications);
  std::vector<CoverageResult> results(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    results[l].coverage = static_cast<double>(covered[l]) / reps;
    results[l].std_error = binomial_se(alpha, spec.replications);
    results[l].replications = spec.replications;
    results[l].low_replications = spec.replications < 100;
  }
  return results;
}

CoverageResult simulate_coverage(const SyntheticStreamSpec& spec, double lambda,
                                 long omega, double alpha) {
  const double lambdas[1] = {lambda};
  return simulate_coverage_grid(spec, lambdas, omega, alpha).front();
}

PowerResult simulate_power(const SyntheticStreamSpec& spec, double lambda,
                           long omega, double alpha) {
  spec.validate();
  check_params(lambda, omega, alpha);
  if (spec.kind != StreamKind::ConstantShift || spec.shift == 0.0) {
    throw std::invalid_argument(
        "detection delay needs a constant-shift stream with nonzero shift");
  }

  const double threshold = rejection_log_threshold(alpha);
  const double psi = psi_sub_exponential(lambda);
  const double orientation = spec.shift > 0.0 ? 1.0 : -1.0;

  std::vector<double> delays(static_cast<std::size_t>(spec.replications));
  std::vector<double> stream;
  WindowScan scan(omega);
  long crossed = 0;

  for (long rep = 0; rep < spec.replications; ++rep) {
    generate_stream(spec, static_cast<std::uint64_t>(rep), stream);
    scan.reset();
    double delay = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const WindowStats st = scan.push(stream[i]);
      if (orientation * lambda * st.sum - psi * st.var_sum >= threshold) {
        delay = static_cast<double>(i + 1);
        break;
      }
    }
    if (std::isfinite(delay)) ++crossed;
    delays[static_cast<std::size_t>(rep)] = delay;
  }

  std::sort(delays.begin(), delays.end());
  const std::size_t n = delays.size();
  const double median = (n % 2 == 1)
                            ? delays[n / 2]
                            : 0.5 * (delays[n / 2 - 1] + delays[n / 2]);

  PowerResult result;
  result.median_delay = median;
  result.crossed_fraction =
      static_cast<double>(crossed) / static_cast<double>(spec.replications);
  result.replications = spec.replications;
  result.low_replications = spec.replications < 100;
  return result;
}

}  // namespace eselect
