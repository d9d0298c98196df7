#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace bubble {

struct NelderMeadOptions {
  int max_evals = 400;
  double x_tol = 1e-8;  // max vertex distance to the best vertex, per coordinate
  double f_tol = 1e-14;  // absolute spread of function values
};

template <int N>
struct NelderMeadResult {
  Eigen::Matrix<double, N, 1> x;
  double f = std::numeric_limits<double>::infinity();
  int evals = 0;
  bool converged = false;
};

/// Derivative-free downhill simplex on a fixed-dimension problem. The
/// objective may return +inf to reject infeasible points. Deterministic.
template <int N, typename Objective>
NelderMeadResult<N> nelder_mead(Objective&& f, const Eigen::Matrix<double, N, 1>& start,
                                const Eigen::Matrix<double, N, 1>& steps, const NelderMeadOptions& opt = {}) {
  using Vec = Eigen::Matrix<double, N, 1>;
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  std::array<Vec, N + 1> x;
  std::array<double, N + 1> fx;
  int evals = 0;
  auto eval = [&](const Vec& v) {
    ++evals;
    const double y = f(v);
    return std::isnan(y) ? std::numeric_limits<double>::infinity() : y;
  };

  x[0] = start;
  fx[0] = eval(start);
  for (int i = 0; i < N; ++i) {
    x[i + 1] = start;
    x[i + 1](i) += steps(i);
    fx[i + 1] = eval(x[i + 1]);
  }

  std::array<int, N + 1> order;
  bool converged = false;
  while (evals < opt.max_evals) {
    for (int i = 0; i <= N; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int best = order[0], worst = order[N], second_worst = order[N - 1];

    double spread = 0.0;
    for (int i = 1; i <= N; ++i)
      spread = std::max(spread, (x[order[i]] - x[best]).cwiseAbs().maxCoeff());
    if (std::isfinite(fx[worst]) && spread <= opt.x_tol && fx[worst] - fx[best] <= opt.f_tol) {
      converged = true;
      break;
    }
    if (spread <= opt.x_tol * 1e-3) {  // collapsed simplex
      converged = std::isfinite(fx[best]);
      break;
    }

    Vec centroid = Vec::Zero();
    for (int i = 0; i < N; ++i) centroid += x[order[i]];
    centroid /= N;

    const Vec xr = centroid + kReflect * (centroid - x[worst]);
    const double fr = eval(xr);
    if (fr < fx[best]) {
      const Vec xe = centroid + kExpand * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        x[worst] = xe;
        fx[worst] = fe;
      } else {
        x[worst] = xr;
        fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[second_worst]) {
      x[worst] = xr;
      fx[worst] = fr;
      continue;
    }
    const bool outside = fr < fx[worst];
    const Vec xc = outside ? Vec(centroid + kContract * (xr - centroid))
                           : Vec(centroid + kContract * (x[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : fx[worst])) {
      x[worst] = xc;
      fx[worst] = fc;
      continue;
    }
    for (int i = 1; i <= N; ++i) {
      const int k = order[i];
      x[k] = x[best] + kShrink * (x[k] - x[best]);
      fx[k] = eval(x[k]);
    }
  }

  const auto it = std::min_element(fx.begin(), fx.end());
  NelderMeadResult<N> r;
  r.x = x[static_cast<std::size_t>(it - fx.begin())];
  r.f = *it;
  r.evals = evals;
  r.converged = converged;
  return r;
}

}  // namespace bubble
