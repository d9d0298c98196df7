#include <doctest.h>

#include <cmath>
#include <set>

#include "bubble/error.hpp"
#include "bubble/synth.hpp"

using namespace bubble;
using namespace bubble::synth;

namespace {

SynthSpec series_spec(double sigma, std::uint64_t seed = 5) {
  SynthSpec s;
  s.seed = seed;
  s.params = {2013.375, 0.5, 9.0, 8.3, -0.4, 0.03, -0.02};
  s.noise_sigma = sigma;
  return s;
}

}  // namespace

TEST_CASE("noiseless series equals the model") {
  const auto sample = gen_lppl_series(series_spec(0.0));
  REQUIRE(sample.series.points.size() == 32);
  CHECK(sample.series.points.front().quarter == Quarter{2005, 1});
  for (const auto& p : sample.series.points)
    CHECK(std::log(p.value) == doctest::Approx(lppl::lppl_eval(sample.truth, p.quarter.time())).epsilon(1e-14));
}

TEST_CASE("noise level and determinism") {
  const auto a = gen_lppl_series(series_spec(0.02));
  const auto b = gen_lppl_series(series_spec(0.02));
  CHECK(a.series.points == b.series.points);
  CHECK_FALSE(gen_lppl_series(series_spec(0.02, 6)).series.points == a.series.points);

  // a single 32-point sample std misses by more than 30% about 2% of the time
  int within = 0;
  double pooled = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = gen_lppl_series(series_spec(0.02, seed));
    double sum = 0.0, sq = 0.0;
    for (const auto& p : s.series.points) {
      const double r = std::log(p.value) - lppl::lppl_eval(s.truth, p.quarter.time());
      sum += r;
      sq += r * r;
    }
    const double n = 32.0;
    const double var = (sq - sum * sum / n) / (n - 1);
    within += std::abs(std::sqrt(var) - s.noise_std) <= 0.3 * s.noise_std;
    pooled += var / (s.noise_std * s.noise_std);
  }
  CHECK(a.noise_std > 0.0);
  CHECK(within >= 95);
  CHECK(std::sqrt(pooled / 100.0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("grid reaching tc is an error unless post-critical") {
  auto s = series_spec(0.0);
  s.params.tc = 2010.0;
  CHECK_THROWS_AS(gen_lppl_series(s), PreconditionError);
  s.post_critical = true;
  CHECK_NOTHROW(gen_lppl_series(s));
}

TEST_CASE("qualified draws qualify") {
  std::mt19937_64 rng(3);
  const auto t = grid_times(SynthSpec{});
  const lppl::FitConfig cfg;
  for (int i = 0; i < 200; ++i) CHECK(lppl::qualify(draw_qualified_params(rng, t, {}, cfg), t, cfg) == lppl::kQualified);
}

TEST_CASE("listing corpus bookkeeping") {
  SynthSpec spec;
  spec.seed = 4;
  spec.n_listings = 2000;
  spec.dup_rate = 0.3;
  const auto c = gen_listing_corpus(spec);
  CHECK(c.listings.size() == 2000);
  CHECK(c.planted_duplicates == 600);
  CHECK(c.base_count == 1400);

  std::set<std::string> clusters;
  for (const auto& [id, cluster] : c.truth) clusters.insert(cluster);
  CHECK(clusters.size() == c.base_count);

  // duplicates share the blocking key with their cluster
  std::map<std::string, dedup::BlockKey> key_of;
  for (const auto& l : c.listings) {
    const auto& cl = c.truth.at(l.id);
    const auto k = dedup::block_key(l);
    const auto [it, fresh] = key_of.emplace(cl, k);
    if (!fresh) CHECK(it->second == k);
  }

  const auto again = gen_listing_corpus(spec);
  CHECK(again.listings == c.listings);

  spec.dup_rate = 0.0;
  const auto singles = gen_listing_corpus(spec);
  std::set<std::string> s;
  for (const auto& [id, cluster] : singles.truth) s.insert(cluster);
  CHECK(s.size() == singles.listings.size());
}
