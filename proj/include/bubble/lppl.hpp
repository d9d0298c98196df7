#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bubble/error.hpp"
#include "bubble/index.hpp"

namespace bubble::lppl {

/// Log-periodic power law parameters. Times are fractional years.
template <typename Scalar>
struct BasicParams {
  Scalar tc{};     // critical time
  Scalar m{};      // power exponent
  Scalar omega{};  // log-frequency
  Scalar a{};      // log-price level at tc
  Scalar b{};      // power-law amplitude
  Scalar c1{};     // cosine amplitude
  Scalar c2{};     // sine amplitude

  bool operator==(const BasicParams&) const = default;
};

using Params = BasicParams<double>;

namespace detail {
/// Model value at distance dt = |tc - t| > 0.
template <typename Scalar>
Scalar lppl_at_distance(const BasicParams<Scalar>& p, Scalar dt) {
  using std::cos;
  using std::log;
  using std::pow;
  using std::sin;
  const Scalar power = pow(dt, p.m);
  const Scalar phase = p.omega * log(dt);
  return p.a + power * (p.b + p.c1 * cos(phase) + p.c2 * sin(phase));
}
}  // namespace detail

/// y(t) = A + B (tc-t)^m + (tc-t)^m [C1 cos(w ln(tc-t)) + C2 sin(w ln(tc-t))], defined for t < tc.
template <typename Scalar>
Scalar lppl_eval(const BasicParams<Scalar>& p, Scalar t) {
  if (!(t < p.tc)) throw DomainError("lppl_eval: t must precede the critical time");
  return detail::lppl_at_distance(p, p.tc - t);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lppl_eval(const BasicParams<Scalar>& p,
                                                   const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& t) {
  return t.unaryExpr([&p](Scalar ti) { return lppl_eval(p, ti); });
}

/// Two-sided form used for fitting across the critical time: the model is
/// mirrored in |tc - t| after tc (post-peak regime) and equals A at tc.
template <typename Scalar>
Scalar lppl_eval_extended(const BasicParams<Scalar>& p, Scalar t) {
  using std::abs;
  const Scalar dt = abs(p.tc - t);
  if (dt == Scalar(0)) return p.a;
  return detail::lppl_at_distance(p, dt);
}

/// Log-price observations.
struct LogSeries {
  Eigen::VectorXd t;
  Eigen::VectorXd y;

  Eigen::Index size() const { return t.size(); }
};

/// Log of the series values; fallback points are dropped unless `use_fallback`.
LogSeries to_log_series(const index::IndexSeries& series, bool use_fallback);

class DegenerateBasisError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct LinearSolution {
  double a = 0.0, b = 0.0, c1 = 0.0, c2 = 0.0;
  double sse = 0.0;
};

/// Least-squares (A, B, C1, C2) for fixed (tc, m, omega). Requires at least
/// four points; points at or after tc use the mirrored distance. Throws
/// DegenerateBasisError when the four basis columns are rank deficient.
LinearSolution subordinate_linear(const LogSeries& series, double tc, double m, double omega);

/// Design matrix with columns {1, d^m, d^m cos(w ln d), d^m sin(w ln d)}, d = |tc - t|.
Eigen::MatrixX4d basis_matrix(const Eigen::VectorXd& t, double tc, double m, double omega);

enum Reason : std::uint32_t {
  kQualified = 0,
  kMOutOfRange = 1u << 0,
  kBNotNegative = 1u << 1,
  kOmegaOutOfBand = 1u << 2,
  kTcOutOfWindow = 1u << 3,
  kFewOscillations = 1u << 4,
  kDegenerateBasis = 1u << 5,
  kNoValidStart = 1u << 6,
};

/// Comma-separated reason names, "qualified" when none.
std::string reasons_to_string(std::uint32_t reasons);

struct FitConfig {
  std::size_t min_points = 20;
  double m_min = 0.1;
  double m_max = 0.9;
  double omega_min = 4.0;
  double omega_max = 25.0;
  double tc_horizon_years = 2.0;   // qualified tc <= t_last + horizon
  double tc_lookback_years = 2.0;  // qualified tc > t_last - lookback
  double min_oscillations = 2.5;
  std::size_t bootstrap_replicates = 200;
  double bootstrap_max_failure = 0.5;
  std::size_t bootstrap_starts = 3;  // refit starts per replicate
  bool use_fallback = false;
  std::uint64_t seed = 42;

  // multi-start grid, tc offsets relative to the last observation
  std::vector<double> grid_tc_offsets{-1.6, -1.1, -0.7, -0.4, -0.15, 0.05, 0.15, 0.3,
                                      0.5,  0.75, 1.05, 1.45, 2.0};
  std::vector<double> grid_m{0.15, 0.3, 0.5, 0.7, 0.85};
  std::vector<double> grid_omega{5.0, 8.0, 11.0, 14.0, 18.0, 22.0};

  int start_max_evals = 150;
  int polish_max_evals = 2000;
  std::size_t polish_candidates = 3;
};

/// Refined multi-start candidate.
struct Candidate {
  double tc = 0.0, m = 0.0, omega = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

struct FitResult {
  Params params;
  double sse = std::numeric_limits<double>::infinity();
  std::size_t n_points = 0;
  double t_first = 0.0;
  double t_last = 0.0;
  double oscillations = 0.0;
  std::uint32_t reasons = kNoValidStart;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  std::vector<Candidate> candidates;  // one per grid start, after refinement

  bool qualified() const { return reasons == kQualified; }
};

/// Oscillation periods between the first observation and the last one before tc.
double oscillation_count(const Eigen::VectorXd& t, double tc, double omega);

/// Qualification reason bits for a parameter set on a time grid.
std::uint32_t qualify(const Params& p, const Eigen::VectorXd& t, const FitConfig& config);

/// Multi-start calibration: every grid start is refined by a simplex descent
/// on (tc, m, omega) with the linear parameters solved at each evaluation,
/// the best few are polished, and the overall best is qualified.
/// Throws PreconditionError when the series has fewer than min_points points.
FitResult fit_lppl(const LogSeries& series, const FitConfig& config);

/// Local refit from given starts only (used by the bootstrap).
FitResult refit_lppl(const LogSeries& series, const std::vector<Candidate>& starts, const FitConfig& config);

}  // namespace bubble::lppl
