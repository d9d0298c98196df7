#include <doctest.h>

#include <cmath>
#include <random>

#include "bubble/error.hpp"
#include "bubble/lppl.hpp"
#include "bubble/synth.hpp"

using namespace bubble;
using namespace bubble::lppl;

namespace {

Eigen::VectorXd quarter_grid(int n, double first = 2005.125) {
  return Eigen::VectorXd::LinSpaced(n, first, first + 0.25 * (n - 1));
}

LogSeries exact_series(const Params& p, const Eigen::VectorXd& t) {
  return {t, lppl_eval<double>(p, t)};
}

}  // namespace

TEST_CASE("lppl_eval closed forms") {
  const Params p{100.0, 0.5, 7.0, 10.0, -1.0, 0.0, 0.0};
  CHECK(lppl_eval(p, 96.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK_THROWS_AS(lppl_eval(p, 100.0), DomainError);
  CHECK_THROWS_AS(lppl_eval(p, 101.0), DomainError);
  CHECK(lppl_eval_extended(p, 100.0) == 10.0);
  CHECK(lppl_eval_extended(p, 104.0) == doctest::Approx(8.0));
}

TEST_CASE("pure power law with negative B is increasing and convex") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> m(0.05, 0.95), b(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Params p{2013.5, m(rng), 9.0, 8.0, -b(rng), 0.0, 0.0};
    const auto y = lppl_eval<double>(p, quarter_grid(32));
    for (Eigen::Index i = 1; i < y.size(); ++i) CHECK(y(i) > y(i - 1));
    for (Eigen::Index i = 2; i < y.size(); ++i) CHECK(y(i) - 2 * y(i - 1) + y(i - 2) > 0.0);
  }
}

TEST_CASE("lppl_eval matches a step-by-step evaluation") {
  const Params p{2014.0, 0.4, 9.0, 8.0, -0.8, 0.05, -0.03};
  const auto t = quarter_grid(32);
  const auto y = lppl_eval<double>(p, t);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double d = 2014.0 - t(i);
    const double dm = std::exp(0.4 * std::log(d));
    const double ln_d = std::log(d);
    const double expected = 8.0 + (-0.8) * dm + dm * 0.05 * std::cos(9.0 * ln_d) + dm * (-0.03) * std::sin(9.0 * ln_d);
    CHECK(y(i) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("subordinate_linear round trip and normal equations") {
  const Params p{2014.0, 0.4, 9.0, 8.0, -0.8, 0.05, -0.03};
  const auto s = exact_series(p, quarter_grid(32));
  const auto lin = subordinate_linear(s, p.tc, p.m, p.omega);
  CHECK(lin.a == doctest::Approx(p.a).epsilon(1e-9));
  CHECK(lin.b == doctest::Approx(p.b).epsilon(1e-9));
  CHECK(lin.c1 == doctest::Approx(p.c1).epsilon(1e-7));
  CHECK(lin.c2 == doctest::Approx(p.c2).epsilon(1e-7));
  CHECK(lin.sse < 1e-20);

  // arbitrary (tc, m, omega): residuals orthogonal to every basis column
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 0.05);
  LogSeries noisy = s;
  for (Eigen::Index i = 0; i < noisy.y.size(); ++i) noisy.y(i) += noise(rng);
  for (const auto& [tc, m, w] : {std::tuple{2013.6, 0.3, 6.0}, {2015.0, 0.8, 12.0}, {2011.0, 0.5, 9.0}}) {
    const auto l = subordinate_linear(noisy, tc, m, w);
    const auto x = basis_matrix(noisy.t, tc, m, w);
    const Eigen::Vector4d coef(l.a, l.b, l.c1, l.c2);
    const Eigen::VectorXd r = noisy.y - x * coef;
    CHECK(r.squaredNorm() == doctest::Approx(l.sse).epsilon(1e-9));
    const Eigen::Vector4d g = x.transpose() * r;
    for (int k = 0; k < 4; ++k) CHECK(std::abs(g(k)) < 1e-8 * (1.0 + x.col(k).norm()));
  }
}

TEST_CASE("subordinate_linear degenerate inputs") {
  const auto t = quarter_grid(32);
  const LogSeries flat{t, Eigen::VectorXd::Constant(32, 8.5)};
  const auto lin = subordinate_linear(flat, 2014.0, 0.5, 9.0);
  CHECK(lin.a == doctest::Approx(8.5));
  CHECK(std::abs(lin.b) < 1e-9);
  CHECK(std::abs(lin.c1) < 1e-9);
  CHECK(std::abs(lin.c2) < 1e-9);

  const LogSeries three{quarter_grid(3), Eigen::VectorXd::Ones(3)};
  CHECK_THROWS_AS(subordinate_linear(three, 2014.0, 0.5, 9.0), PreconditionError);
  // m = 0 makes the power column equal to the constant column
  CHECK_THROWS_AS(subordinate_linear(flat, 2014.0, 0.0, 9.0), DegenerateBasisError);
}

TEST_CASE("qualification flags") {
  const auto t = quarter_grid(32);
  const FitConfig cfg;
  const Params good{2013.5, 0.5, 9.0, 8.0, -0.5, 0.03, 0.02};
  CHECK(qualify(good, t, cfg) == kQualified);
  auto p = good;
  p.m = 0.95;
  CHECK(qualify(p, t, cfg) == kMOutOfRange);
  p = good;
  p.b = 0.1;
  CHECK(qualify(p, t, cfg) == kBNotNegative);
  p = good;
  p.omega = 30.0;
  CHECK(qualify(p, t, cfg) == kOmegaOutOfBand);
  p = good;
  p.tc = t(31) + 2.5;
  CHECK((qualify(p, t, cfg) & kTcOutOfWindow) != 0);
  p = good;
  p.omega = 4.5;
  CHECK((qualify(p, t, cfg) & kFewOscillations) != 0);
  CHECK(reasons_to_string(kQualified) == "qualified");
  CHECK(reasons_to_string(kMOutOfRange | kBNotNegative).find("b_not_negative") != std::string::npos);

  // omega / 2pi * ln((tc - t_first) / (tc - t_last))
  CHECK(oscillation_count(t, 2013.5, 9.0) ==
        doctest::Approx(9.0 / (2 * M_PI) * std::log((2013.5 - t(0)) / (2013.5 - t(31)))));
}

TEST_CASE("fit_lppl recovers a noiseless series") {
  const auto t = quarter_grid(32);
  const Params truth{t(31) + 0.5, 0.45, 8.0, 8.3, -0.35, 0.04, -0.03};
  const auto fit = fit_lppl(exact_series(truth, t), {});
  CHECK(fit.qualified());
  CHECK(std::abs(fit.params.tc - truth.tc) <= 0.25);
  CHECK(std::abs(fit.params.m - truth.m) <= 0.05);
  CHECK(std::abs(fit.params.omega - truth.omega) <= 0.5);
  CHECK(fit.n_points == 32);
  // global argmin over the refined candidates
  for (const auto& c : fit.candidates) CHECK(fit.sse <= c.sse + 1e-12);
}

TEST_CASE("fit_lppl rejects linear and flat series") {
  const auto t = quarter_grid(32);
  Eigen::VectorXd lin(32);
  for (int k = 0; k < 32; ++k) lin(k) = std::log(4000.0 + 156.0 * k);
  const auto lf = fit_lppl({t, lin}, {});
  CHECK_FALSE(lf.qualified());

  const auto ff = fit_lppl({t, Eigen::VectorXd::Constant(32, 8.0)}, {});
  CHECK_FALSE(ff.qualified());
  CHECK((ff.reasons & kDegenerateBasis) != 0);

  CHECK_THROWS_AS(fit_lppl({quarter_grid(12), Eigen::VectorXd::Ones(12)}, {}), PreconditionError);
}

TEST_CASE("super-exponential curve for a qualified pure power law fit") {
  const auto t = quarter_grid(32);
  const Params truth{t(31) + 0.75, 0.5, 9.0, 8.3, -0.4, 0.0, 0.0};
  const auto fit = fit_lppl(exact_series(truth, t), {});
  if (fit.qualified()) {
    for (Eigen::Index i = 2; i < fit.fitted.size(); ++i)
      CHECK(fit.fitted(i) - 2 * fit.fitted(i - 1) + fit.fitted(i - 2) > 0.0);
  }
}

TEST_CASE("fit is invariant to price scale and equivariant to time shifts") {
  const auto t = quarter_grid(32);
  std::mt19937_64 rng(31);
  const auto truth = synth::draw_qualified_params(rng, t, {}, {});
  std::normal_distribution<double> noise(0.0, 0.01);
  LogSeries s = exact_series(truth, t);
  for (Eigen::Index i = 0; i < s.y.size(); ++i) s.y(i) += noise(rng);
  const auto base = fit_lppl(s, {});

  LogSeries scaled = s;
  scaled.y.array() += std::log(3.7);
  const auto fs = fit_lppl(scaled, {});
  CHECK(fs.reasons == base.reasons);
  CHECK(std::abs(fs.params.tc - base.params.tc) < 1e-6);
  CHECK(std::abs(fs.params.m - base.params.m) < 1e-6);
  CHECK(std::abs(fs.params.omega - base.params.omega) < 1e-6);
  CHECK(std::abs(fs.params.a - base.params.a - std::log(3.7)) < 1e-6);

  LogSeries shifted = s;
  shifted.t.array() += 3.0;
  const auto ft = fit_lppl(shifted, {});
  CHECK(ft.reasons == base.reasons);
  CHECK(std::abs(ft.params.tc - base.params.tc - 3.0) < 1e-6);
  CHECK(std::abs(ft.params.m - base.params.m) < 1e-6);
  CHECK(std::abs(ft.params.omega - base.params.omega) < 1e-6);
  CHECK(std::abs(ft.params.b - base.params.b) < 1e-6);
}

TEST_CASE("to_log_series drops fallback points by default") {
  index::IndexSeries s;
  s.points = {{{2005, 1}, 100.0, 12, false}, {{2005, 2}, 200.0, 3, true}, {{2005, 3}, 300.0, 11, false}};
  const auto ls = to_log_series(s, false);
  REQUIRE(ls.size() == 2);
  CHECK(ls.t(1) == 2005.625);
  CHECK(ls.y(1) == doctest::Approx(std::log(300.0)));
  CHECK(to_log_series(s, true).size() == 3);
}
