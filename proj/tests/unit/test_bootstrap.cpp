#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bubble/bootstrap.hpp"
#include "bubble/diagnose.hpp"
#include "bubble/error.hpp"
#include "bubble/synth.hpp"

using namespace bubble;
using namespace bubble::lppl;

namespace {

LogSeries noiseless(const Params& p) {
  synth::SynthSpec spec;
  spec.params = p;
  const auto t = synth::grid_times(spec);
  return {t, lppl_eval<double>(p, t)};
}

FitResult planted_fit(double tc, double t_last, std::uint32_t reasons = kQualified) {
  FitResult f;
  f.params.tc = tc;
  f.t_last = t_last;
  f.reasons = reasons;
  return f;
}

}  // namespace

TEST_CASE("quantile interpolates") {
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.5) == 3.0);
  CHECK(quantile({5.0, 1.0, 3.0, 2.0, 4.0}, 0.1) == doctest::Approx(1.4));
  CHECK(quantile({7.0}, 0.9) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), PreconditionError);
}

TEST_CASE("bootstrap on a noiseless series is tight and covers tc") {
  const Params truth{2013.375, 0.5, 9.0, 8.3, -0.4, 0.03, -0.02};
  const auto s = noiseless(truth);
  FitConfig cfg;
  cfg.bootstrap_replicates = 50;
  const auto fit = fit_lppl(s, cfg);
  REQUIRE(fit.qualified());
  const auto b = bootstrap_tc(s, fit, cfg);
  CHECK(b.interval.lo <= b.interval.hi);
  CHECK(b.interval.hi - b.interval.lo < 0.25);
  CHECK(b.interval.lo <= truth.tc + 1e-6);
  CHECK(b.interval.hi >= truth.tc - 1e-6);
  CHECK(b.failed == 0);

  const auto again = bootstrap_tc(s, fit, cfg);
  CHECK(again.interval.lo == b.interval.lo);
  CHECK(again.interval.hi == b.interval.hi);
}

TEST_CASE("bootstrap requires a qualified fit") {
  const auto s = noiseless({2013.375, 0.5, 9.0, 8.3, -0.4, 0.03, -0.02});
  FitResult f;
  CHECK_THROWS_AS(bootstrap_tc(s, f, {}), PreconditionError);
}

TEST_CASE("scenario paths") {
  FitResult fit;
  fit.params = {2013.4, 0.5, 9.0, 8.3, -0.4, 0.03, -0.02};
  fit.t_first = 2005.125;
  fit.t_last = 2012.875;

  const auto single = scenario_paths(fit, {}, 8);
  REQUIRE(single.size() == 1);
  CHECK(single[0].tc == fit.params.tc);
  CHECK(single[0].t.back() == doctest::Approx(2013.4 - 1e-3));

  std::vector<Params> ensemble;
  for (int k = 0; k < 5; ++k) {
    auto p = fit.params;
    p.tc += 0.3 * k;
    p.m += 0.02 * k;
    ensemble.push_back(p);
  }
  const auto paths = scenario_paths(fit, ensemble, 8);
  REQUIRE(paths.size() == ensemble.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = ensemble[i];
    CHECK(paths[i].tc == p.tc);
    CHECK(paths[i].t.front() == fit.t_first);
    CHECK(paths[i].t.back() <= std::min(p.tc - 1e-3, fit.t_last + 2.0) + 1e-12);
    for (std::size_t k = 0; k < paths[i].t.size(); ++k) CHECK(paths[i].y[k] == lppl_eval(p, paths[i].t[k]));
  }

  const auto same = scenario_paths(fit, {fit.params, fit.params}, 8);
  CHECK(same[0].t == same[1].t);
  CHECK(same[0].y == same[1].y);
}

TEST_CASE("diagnose_series verdicts") {
  using namespace bubble::diagnose;
  const index::IndexCell cell{"D1", PropertyType::Apartment, index::SizeClass::Medium};
  const double t_last = 2012.875;

  const auto critical = diagnose_series(cell, planted_fit(t_last + 0.5, t_last), TcInterval{2013.1, 2013.9}, t_last);
  CHECK(critical.verdict == Verdict::Critical);
  REQUIRE(critical.critical_window);
  CHECK(critical.critical_window->first == Quarter{2013, 1});
  CHECK(critical.critical_window->second == Quarter{2013, 4});

  const auto burst = diagnose_series(cell, planted_fit(t_last - 0.3, t_last), TcInterval{2012.3, 2012.7}, t_last);
  CHECK(burst.verdict == Verdict::Burst);
  REQUIRE(burst.critical_window);
  CHECK(burst.critical_window->first == Quarter{2012, 2});
  CHECK(burst.critical_window->second == Quarter{2012, 3});

  const auto none = diagnose_series(cell, planted_fit(t_last + 0.5, t_last, kMOutOfRange), std::nullopt, t_last);
  CHECK(none.verdict == Verdict::None);
  CHECK_FALSE(none.tc_interval);
  CHECK_FALSE(none.tc);

  // tc exactly at the last observation counts as already burst
  CHECK(diagnose_series(cell, planted_fit(t_last, t_last), std::nullopt, t_last).verdict == Verdict::Burst);
}

TEST_CASE("aggregate_report") {
  using namespace bubble::diagnose;
  auto d = [](const std::string& id, PropertyType type, Verdict v) {
    DistrictDiagnosis x;
    x.cell = {id, type, index::SizeClass::Medium};
    x.verdict = v;
    return x;
  };
  const auto rep = aggregate_report({d("D2", PropertyType::House, Verdict::None),
                                     d("D2", PropertyType::Apartment, Verdict::Critical),
                                     d("D1", PropertyType::House, Verdict::Burst),
                                     d("D3", PropertyType::House, Verdict::None)});
  REQUIRE(rep.districts.size() == 3);
  CHECK(rep.districts[0].district_id == "D1");
  CHECK(rep.districts[1].verdict == Verdict::Critical);
  REQUIRE(rep.districts[1].cells.size() == 1);
  CHECK(rep.districts[1].cells[0].cell.property_type == PropertyType::Apartment);
  CHECK(rep.critical == 1);
  CHECK(rep.burst == 1);
  CHECK(rep.none == 1);

  const auto quiet = aggregate_report({d("A", PropertyType::House, Verdict::None), d("B", PropertyType::House, Verdict::None)});
  CHECK(quiet.with(Verdict::Critical).empty());
  CHECK(quiet.none == 2);
}

TEST_CASE("aggregate verdict is monotone in cell severity") {
  using namespace bubble::diagnose;
  const Verdict all[] = {Verdict::None, Verdict::Burst, Verdict::Critical};
  for (Verdict a : all)
    for (Verdict b : all)
      for (Verdict raised : all) {
        if (raised < b) continue;
        DistrictDiagnosis x, y;
        x.cell = {"D", PropertyType::House, index::SizeClass::Small};
        y.cell = {"D", PropertyType::Apartment, index::SizeClass::Small};
        x.verdict = a;
        y.verdict = b;
        const auto before = aggregate_report({x, y}).districts.at(0).verdict;
        y.verdict = raised;
        const auto after = aggregate_report({x, y}).districts.at(0).verdict;
        CHECK(after >= before);
        CHECK(after == std::max(a, raised));
      }
}
