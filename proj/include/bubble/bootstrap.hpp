#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bubble/lppl.hpp"

namespace bubble::lppl {

struct TcInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.80;
};

struct BootstrapResult {
  TcInterval interval;
  std::vector<Params> replicates;  // qualified refits only, replicate order
  std::size_t attempted = 0;
  std::size_t failed = 0;
  std::uint64_t seed = 0;
};

class BootstrapError : public std::runtime_error {
 public:
  BootstrapError(const std::string& what, double failure_fraction)
      : std::runtime_error(what), failure_fraction_(failure_fraction) {}
  double failure_fraction() const { return failure_fraction_; }

 private:
  double failure_fraction_;
};

/// SplitMix64 finalizer, used to derive independent per-replicate seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Linear-interpolation sample quantile (p in [0, 1]) of unsorted values.
double quantile(std::vector<double> values, double p);

/// Residual bootstrap of the critical time: centered residuals, inflated by
/// sqrt(n / (n - 7)) for the fitted degrees of freedom, are resampled with
/// replacement onto the fitted curve and each replicate is refitted from the
/// best point-fit candidates. The interval spans the 10th to 90th percentile
/// of qualified replicate tc values. Throws PreconditionError for an
/// unqualified fit and BootstrapError when more than
/// config.bootstrap_max_failure of the refits fail qualification.
BootstrapResult bootstrap_tc(const LogSeries& series, const FitResult& fit, const FitConfig& config);

struct Trajectory {
  double tc = 0.0;
  std::vector<double> t;
  std::vector<double> y;  // log-price
};

/// One extrapolated path per replicate parameter set (or the point fit when
/// there are none), sampled on the quarterly grid from the first observation
/// up to min(tc - eps, t_last + horizon_quarters / 4).
std::vector<Trajectory> scenario_paths(const FitResult& fit, const std::vector<Params>& replicates,
                                       int horizon_quarters, double eps = 1e-3);

}  // namespace bubble::lppl
