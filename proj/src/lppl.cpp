#include "bubble/lppl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bubble/nelder_mead.hpp"

namespace bubble::lppl {

LogSeries to_log_series(const index::IndexSeries& series, bool use_fallback) {
  std::vector<double> t, y;
  for (const auto& p : series.points) {
    if (p.fallback && !use_fallback) continue;
    if (!(p.value > 0.0)) throw PreconditionError("series value must be positive before the log transform");
    t.push_back(p.quarter.time());
    y.push_back(std::log(p.value));
  }
  LogSeries out;
  out.t = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  out.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return out;
}

namespace {

constexpr double kRankThreshold = 1e-10;

// Fills the basis for distances d_i = |tau - u_i|; a zero distance contributes
// only to the constant column.
void fill_basis(Eigen::MatrixX4d& x, const Eigen::VectorXd& u, double tau, double m, double omega) {
  const Eigen::Index n = u.size();
  x.resize(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = std::abs(tau - u(i));
    x(i, 0) = 1.0;
    if (d == 0.0) {
      x(i, 1) = x(i, 2) = x(i, 3) = 0.0;
      continue;
    }
    const double ld = std::log(d);
    const double power = std::exp(m * ld);
    x(i, 1) = power;
    x(i, 2) = power * std::cos(omega * ld);
    x(i, 3) = power * std::sin(omega * ld);
  }
}

// Linear least squares on a (possibly centered) target. Returns false when
// the basis is numerically rank deficient.
struct LinearSolver {
  Eigen::MatrixX4d x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixX4d> qr;
  Eigen::Vector4d beta;

  bool solve(const Eigen::VectorXd& u, const Eigen::VectorXd& y, double tau, double m, double omega,
             double& sse) {
    fill_basis(x, u, tau, m, omega);
    if (!x.allFinite()) return false;
    qr.setThreshold(kRankThreshold);
    qr.compute(x);
    if (qr.rank() < 4) return false;
    beta = qr.solve(y);
    sse = (x * beta - y).squaredNorm();
    return std::isfinite(sse);
  }
};

// Objective over (tau, m, omega) with tau = tc - t_last; the log series is
// centered so constant shifts of the data leave the objective unchanged.
class Objective {
 public:
  Objective(const LogSeries& s, const FitConfig& config) {
    t_last_ = s.t.maxCoeff();
    u_ = s.t.array() - t_last_;
    y_mean_ = s.y.mean();
    y_centered_ = s.y.array() - y_mean_;
    tau_lo_ = -(config.tc_lookback_years + 1.0);
    tau_hi_ = config.tc_horizon_years + 1.0;
  }

  double operator()(const Eigen::Vector3d& v) {
    if (!(v(0) > tau_lo_ && v(0) <= tau_hi_ && v(1) >= 0.01 && v(1) <= 1.99 && v(2) >= 0.5 && v(2) <= 50.0))
      return std::numeric_limits<double>::infinity();
    double sse = 0.0;
    if (!solver_.solve(u_, y_centered_, v(0), v(1), v(2), sse)) return std::numeric_limits<double>::infinity();
    return sse;
  }

  double t_last() const { return t_last_; }

  bool linear(double tau, double m, double omega, LinearSolution& out) {
    double sse = 0.0;
    if (!solver_.solve(u_, y_centered_, tau, m, omega, sse)) return false;
    out = {solver_.beta(0) + y_mean_, solver_.beta(1), solver_.beta(2), solver_.beta(3), sse};
    return true;
  }

 private:
  Eigen::VectorXd u_, y_centered_;
  double t_last_ = 0.0, y_mean_ = 0.0;
  double tau_lo_ = 0.0, tau_hi_ = 0.0;
  LinearSolver solver_;
};

const Eigen::Vector3d kSteps{0.1, 0.08, 1.0};

Candidate polish(Objective& objective, const Candidate& start, int max_evals, double x_tol) {
  Eigen::Vector3d x{start.tc - objective.t_last(), start.m, start.omega};
  double f = objective(x);
  NelderMeadOptions opt;
  opt.max_evals = max_evals;
  opt.x_tol = x_tol;
  opt.f_tol = 0.0;
  // restart from the incumbent until a pass stops improving
  for (int pass = 0; pass < 4; ++pass) {
    auto r = nelder_mead<3>(objective, x, Eigen::Vector3d(kSteps * (pass == 0 ? 0.5 : 0.1)), opt);
    const bool improved = r.f < f;
    if (r.f <= f) {
      x = r.x;
      f = r.f;
    }
    if (!improved || r.converged) break;
  }
  return {x(0) + objective.t_last(), x(1), x(2), f};
}

bool close(const Candidate& a, const Candidate& b) {
  return std::abs(a.tc - b.tc) < 0.02 && std::abs(a.m - b.m) < 0.02 && std::abs(a.omega - b.omega) < 0.1;
}

FitResult finish(const LogSeries& series, Objective& objective, const Candidate& best, const FitConfig& config,
                 std::vector<Candidate> candidates) {
  FitResult r;
  r.n_points = static_cast<std::size_t>(series.size());
  r.t_first = series.t.minCoeff();
  r.t_last = series.t.maxCoeff();
  r.candidates = std::move(candidates);

  LinearSolution lin;
  if (!std::isfinite(best.sse) || !objective.linear(best.tc - objective.t_last(), best.m, best.omega, lin)) {
    r.reasons = kNoValidStart;
    r.params.a = series.y.mean();
    r.fitted = Eigen::VectorXd::Constant(series.size(), r.params.a);
    r.residuals = series.y - r.fitted;
    r.sse = r.residuals.squaredNorm();
    return r;
  }
  r.params = {best.tc, best.m, best.omega, lin.a, lin.b, lin.c1, lin.c2};
  r.fitted = series.t.unaryExpr([&](double t) { return lppl_eval_extended(r.params, t); });
  r.residuals = series.y - r.fitted;
  r.sse = lin.sse;
  r.oscillations = oscillation_count(series.t, r.params.tc, r.params.omega);
  r.reasons = qualify(r.params, series.t, config);
  return r;
}

void check_series(const LogSeries& series, const FitConfig& config) {
  if (series.t.size() != series.y.size()) throw PreconditionError("time/value length mismatch");
  const auto n = static_cast<std::size_t>(series.size());
  if (n < std::max<std::size_t>(config.min_points, 4))
    throw PreconditionError("series has " + std::to_string(n) + " points, need at least " +
                            std::to_string(std::max<std::size_t>(config.min_points, 4)));
  if (!series.t.allFinite() || !series.y.allFinite()) throw PreconditionError("series contains non-finite values");
}

bool flat(const LogSeries& series) {
  const double range = series.y.maxCoeff() - series.y.minCoeff();
  return range <= 1e-12 * std::max(1.0, std::abs(series.y.mean()));
}

FitResult flat_result(const LogSeries& series) {
  FitResult r;
  r.n_points = static_cast<std::size_t>(series.size());
  r.t_first = series.t.minCoeff();
  r.t_last = series.t.maxCoeff();
  r.params.a = series.y.mean();
  r.fitted = Eigen::VectorXd::Constant(series.size(), r.params.a);
  r.residuals = series.y - r.fitted;
  r.sse = r.residuals.squaredNorm();
  r.reasons = kDegenerateBasis;
  return r;
}

}  // namespace

Eigen::MatrixX4d basis_matrix(const Eigen::VectorXd& t, double tc, double m, double omega) {
  Eigen::MatrixX4d x;
  fill_basis(x, t, tc, m, omega);
  return x;
}

LinearSolution subordinate_linear(const LogSeries& series, double tc, double m, double omega) {
  if (series.size() < 4) throw PreconditionError("subordinate_linear needs at least 4 points");
  if (series.t.size() != series.y.size()) throw PreconditionError("time/value length mismatch");
  LinearSolver solver;
  const double y_mean = series.y.mean();
  const Eigen::VectorXd yc = series.y.array() - y_mean;
  double sse = 0.0;
  if (!solver.solve(series.t, yc, tc, m, omega, sse))
    throw DegenerateBasisError("LPPL basis is rank deficient for the given (tc, m, omega)");
  return {solver.beta(0) + y_mean, solver.beta(1), solver.beta(2), solver.beta(3), sse};
}

std::string reasons_to_string(std::uint32_t reasons) {
  if (reasons == kQualified) return "qualified";
  static constexpr std::pair<Reason, const char*> kNames[] = {
      {kMOutOfRange, "m_out_of_range"},     {kBNotNegative, "b_not_negative"},
      {kOmegaOutOfBand, "omega_out_of_band"}, {kTcOutOfWindow, "tc_out_of_window"},
      {kFewOscillations, "few_oscillations"}, {kDegenerateBasis, "degenerate_basis"},
      {kNoValidStart, "no_valid_start"}};
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (!(reasons & bit)) continue;
    if (!out.empty()) out += ';';
    out += name;
  }
  return out;
}

double oscillation_count(const Eigen::VectorXd& t, double tc, double omega) {
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  for (double ti : t) {
    if (!(ti < tc)) continue;
    first = std::min(first, ti);
    last = std::max(last, ti);
  }
  if (!(first < last)) return 0.0;
  return omega / (2.0 * std::numbers::pi) * std::log((tc - first) / (tc - last));
}

std::uint32_t qualify(const Params& p, const Eigen::VectorXd& t, const FitConfig& config) {
  std::uint32_t reasons = kQualified;
  if (!(p.m >= config.m_min && p.m <= config.m_max)) reasons |= kMOutOfRange;
  if (!(p.b < 0.0)) reasons |= kBNotNegative;
  if (!(p.omega >= config.omega_min && p.omega <= config.omega_max)) reasons |= kOmegaOutOfBand;
  const double tau = p.tc - t.maxCoeff();
  if (!(tau > -config.tc_lookback_years && tau <= config.tc_horizon_years)) reasons |= kTcOutOfWindow;
  if (!(oscillation_count(t, p.tc, p.omega) >= config.min_oscillations)) reasons |= kFewOscillations;
  return reasons;
}

FitResult fit_lppl(const LogSeries& series, const FitConfig& config) {
  check_series(series, config);
  if (flat(series)) return flat_result(series);

  Objective objective(series, config);
  NelderMeadOptions start_opt;
  start_opt.max_evals = config.start_max_evals;
  start_opt.x_tol = 1e-4;
  start_opt.f_tol = 0.0;

  std::vector<Candidate> candidates;
  candidates.reserve(config.grid_tc_offsets.size() * config.grid_m.size() * config.grid_omega.size());
  for (double tau : config.grid_tc_offsets) {
    for (double m : config.grid_m) {
      for (double omega : config.grid_omega) {
        auto r = nelder_mead<3>(objective, Eigen::Vector3d{tau, m, omega}, kSteps, start_opt);
        candidates.push_back({r.x(0) + objective.t_last(), r.x(1), r.x(2), r.f});
      }
    }
  }

  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].sse < candidates[b].sse; });

  Candidate best;
  std::vector<Candidate> polished;
  for (std::size_t k : order) {
    if (polished.size() >= config.polish_candidates || !std::isfinite(candidates[k].sse)) break;
    if (std::any_of(polished.begin(), polished.end(), [&](const Candidate& c) { return close(c, candidates[k]); }))
      continue;
    polished.push_back(candidates[k]);
    const Candidate p = polish(objective, candidates[k], config.polish_max_evals, 1e-10);
    if (p.sse < best.sse) best = p;
  }
  if (!order.empty() && candidates[order.front()].sse < best.sse) best = candidates[order.front()];
  return finish(series, objective, best, config, std::move(candidates));
}

FitResult refit_lppl(const LogSeries& series, const std::vector<Candidate>& starts, const FitConfig& config) {
  check_series(series, config);
  if (flat(series)) return flat_result(series);
  Objective objective(series, config);
  Candidate best;
  for (const auto& s : starts) {
    const Candidate p = polish(objective, s, 600, 1e-7);
    if (p.sse < best.sse) best = p;
  }
  return finish(series, objective, best, config, {});
}

}  // namespace bubble::lppl
