#include "bubble/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bubble::lppl {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw PreconditionError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {
constexpr int kFittedParameters = 7;
}

BootstrapResult bootstrap_tc(const LogSeries& series, const FitResult& fit, const FitConfig& config) {
  if (!fit.qualified()) throw PreconditionError("bootstrap requires a qualified fit");
  const Eigen::Index n = series.size();
  if (n != fit.residuals.size()) throw PreconditionError("fit does not belong to this series");

  Eigen::VectorXd resid = fit.residuals.array() - fit.residuals.mean();
  if (n > kFittedParameters) resid *= std::sqrt(static_cast<double>(n) / static_cast<double>(n - kFittedParameters));

  // starts: the point estimate plus the next best distinct grid candidates
  std::vector<Candidate> starts{{fit.params.tc, fit.params.m, fit.params.omega, fit.sse}};
  {
    auto sorted = fit.candidates;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Candidate& a, const Candidate& b) { return a.sse < b.sse; });
    for (const auto& c : sorted) {
      if (starts.size() >= std::max<std::size_t>(config.bootstrap_starts, 1)) break;
      if (!std::isfinite(c.sse)) break;
      const bool dup = std::any_of(starts.begin(), starts.end(), [&](const Candidate& s) {
        return std::abs(s.tc - c.tc) < 0.05 && std::abs(s.m - c.m) < 0.05 && std::abs(s.omega - c.omega) < 0.5;
      });
      if (!dup) starts.push_back(c);
    }
  }

  BootstrapResult out;
  out.seed = config.seed;
  out.attempted = config.bootstrap_replicates;
  std::vector<double> tcs;
  LogSeries replica{series.t, Eigen::VectorXd(n)};
  for (std::size_t r = 0; r < config.bootstrap_replicates; ++r) {
    std::mt19937_64 rng(mix_seed(config.seed, r));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    for (Eigen::Index i = 0; i < n; ++i) replica.y(i) = fit.fitted(i) + resid(pick(rng));
    const FitResult refit = refit_lppl(replica, starts, config);
    if (!refit.qualified()) {
      ++out.failed;
      continue;
    }
    out.replicates.push_back(refit.params);
    tcs.push_back(refit.params.tc);
  }

  const double failure = out.attempted ? static_cast<double>(out.failed) / static_cast<double>(out.attempted) : 0.0;
  if (failure > config.bootstrap_max_failure || (out.attempted > 0 && tcs.empty())) {
    throw BootstrapError("bootstrap: " + std::to_string(out.failed) + " of " + std::to_string(out.attempted) +
                             " refits failed qualification",
                         failure);
  }
  if (tcs.empty()) {
    out.interval = {fit.params.tc, fit.params.tc, 0.80};
  } else {
    out.interval = {quantile(tcs, 0.10), quantile(tcs, 0.90), 0.80};
  }
  return out;
}

std::vector<Trajectory> scenario_paths(const FitResult& fit, const std::vector<Params>& replicates,
                                       int horizon_quarters, double eps) {
  std::vector<Params> ensemble = replicates;
  if (ensemble.empty()) ensemble.push_back(fit.params);

  std::vector<Trajectory> paths;
  paths.reserve(ensemble.size());
  for (const auto& p : ensemble) {
    Trajectory tr;
    tr.tc = p.tc;
    const double end = std::min(p.tc - eps, fit.t_last + 0.25 * horizon_quarters);
    for (int k = 0; fit.t_first + 0.25 * k <= end; ++k) {
      const double t = fit.t_first + 0.25 * k;
      tr.t.push_back(t);
      tr.y.push_back(lppl_eval(p, t));
    }
    if (end >= fit.t_first && (tr.t.empty() || tr.t.back() < end)) {
      tr.t.push_back(end);
      tr.y.push_back(lppl_eval(p, end));
    }
    paths.push_back(std::move(tr));
  }
  return paths;
}

}  // namespace bubble::lppl
