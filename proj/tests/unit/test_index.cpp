#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "bubble/error.hpp"
#include "bubble/index.hpp"

using namespace bubble;
using namespace bubble::index;

namespace {

Listing ad(const std::string& district, const std::string& canton, PropertyType type, double rooms,
           std::int64_t price, double space, Quarter q) {
  static int counter = 0;
  Listing l;
  l.id = "x" + std::to_string(counter++);
  l.source_portal = "p";
  l.zip = "8000";
  l.district_id = district;
  l.canton = canton;
  l.property_type = type;
  l.rooms = rooms;
  l.price_chf = price;
  l.living_space_m2 = space;
  l.title = "t";
  l.description = "d";
  l.listed_quarter = q;
  return l;
}

double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

TEST_CASE("size classes on every half step") {
  // rooms -> (house, apartment)
  for (int k = 2; k <= 29; ++k) {
    const double rooms = k / 2.0;
    const SizeClass house = rooms <= 4.5 ? SizeClass::Small : rooms <= 6.5 ? SizeClass::Medium : SizeClass::Large;
    const SizeClass apt = rooms <= 3.5 ? SizeClass::Small : rooms <= 5.5 ? SizeClass::Medium : SizeClass::Large;
    CHECK(classify_size(PropertyType::House, rooms) == house);
    CHECK(classify_size(PropertyType::Apartment, rooms) == apt);
  }
  CHECK(classify_size(PropertyType::House, 5.0) == SizeClass::Medium);
  CHECK(classify_size(PropertyType::House, 7.0) == SizeClass::Large);
  CHECK(classify_size(PropertyType::Apartment, 4.0) == SizeClass::Medium);
  CHECK(classify_size(PropertyType::Apartment, 6.0) == SizeClass::Large);
}

TEST_CASE("median matches a sort-based oracle") {
  CHECK(median(std::vector<double>{3, 1, 2}) == 2.0);
  CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median(std::vector<double>{}), PreconditionError);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(1, 40);
  std::uniform_real_distribution<double> val(100.0, 9000.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = std::round(val(rng));
    CHECK(median(v) == sorted_median(v));
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(median(shuffled) == median(v));
  }
}

TEST_CASE("house series uses price, apartment series uses price per m2") {
  std::vector<Listing> ls;
  const Quarter q{2008, 3};
  for (std::int64_t p : {800000, 900000, 1000000}) ls.push_back(ad("D1", "ZH", PropertyType::House, 5.5, p, 150, q));
  for (double s : {50.0, 100.0}) ls.push_back(ad("D1", "ZH", PropertyType::Apartment, 4.5, 500000, s, q));
  const IndexConfig cfg{1};
  const auto house = build_series(ls, {"D1", PropertyType::House, SizeClass::Medium}, cfg);
  REQUIRE(house.points.size() == 1);
  CHECK(house.points[0].value == 900000.0);
  CHECK(house.points[0].count == 3);
  CHECK_FALSE(house.points[0].fallback);

  const auto apt = build_series(ls, {"D1", PropertyType::Apartment, SizeClass::Medium}, cfg);
  REQUIRE(apt.points.size() == 1);
  CHECK(apt.points[0].value == 7500.0);  // (10000 + 5000) / 2

  CHECK(build_series(ls, {"D1", PropertyType::House, SizeClass::Small}, cfg).points.empty());
}

TEST_CASE("sparse quarters fall back to the cantonal median") {
  std::vector<Listing> ls;
  const Quarter q{2006, 1};
  // D1 has 2 ads, D2 (same canton) has 3; min_ads 10 -> cantonal median of all 5
  for (std::int64_t p : {100, 200}) ls.push_back(ad("D1", "BE", PropertyType::House, 3, p, 10, q));
  for (std::int64_t p : {300, 400, 500}) ls.push_back(ad("D2", "BE", PropertyType::House, 3, p, 10, q));
  ls.push_back(ad("D3", "ZH", PropertyType::House, 3, 9999, 10, q));
  // a quarter where D1 has nothing but the canton does
  ls.push_back(ad("D2", "BE", PropertyType::House, 3, 700, 10, q.next()));
  const auto s = build_series(ls, {"D1", PropertyType::House, SizeClass::Small}, IndexConfig{10});
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[0].value == 300.0);
  CHECK(s.points[0].fallback);
  CHECK(s.points[0].count == 2);
  CHECK(s.points[1].value == 700.0);
  CHECK(s.points[1].fallback);
  CHECK(s.points[1].count == 0);
}

TEST_CASE("build_series equals a brute-force median on random cells") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> district(0, 5), nq(0, 7), half(2, 20), type(0, 1), n_ads(0, 400);
  std::uniform_int_distribution<std::int64_t> price(100000, 3000000);
  std::uniform_real_distribution<double> space(30.0, 250.0);
  std::vector<Listing> ls;
  for (int i = 0, n = n_ads(rng) + 600; i < n; ++i) {
    const int d = district(rng);
    ls.push_back(ad("D" + std::to_string(d), d < 3 ? "AA" : "BB", type(rng) ? PropertyType::House : PropertyType::Apartment,
                    half(rng) / 2.0, price(rng), std::round(space(rng)), Quarter::from_ordinal(Quarter{2005, 1}.ordinal() + nq(rng))));
  }
  const std::size_t min_ads = 6;
  const SeriesBuilder builder(ls, {min_ads});
  for (const auto& cell : builder.cells()) {
    const auto s = builder.build(cell);
    for (const auto& p : s.points) {
      std::vector<double> own, canton;
      std::string cell_canton;
      for (const auto& l : ls)
        if (l.district_id == cell.district_id) cell_canton = l.canton;
      for (const auto& l : ls) {
        if (l.listed_quarter != p.quarter || l.property_type != cell.property_type) continue;
        if (!size_matches(cell.size, classify_size(l.property_type, l.rooms))) continue;
        const double v = l.property_type == PropertyType::House ? static_cast<double>(l.price_chf)
                                                                 : static_cast<double>(l.price_chf) / l.living_space_m2;
        if (l.district_id == cell.district_id) own.push_back(v);
        if (l.canton == cell_canton) canton.push_back(v);
      }
      CHECK(p.count == own.size());
      if (own.size() >= min_ads) {
        CHECK_FALSE(p.fallback);
        CHECK(p.value == sorted_median(own));
      } else {
        CHECK(p.fallback);
        CHECK(p.value == sorted_median(canton));
      }
    }
    CHECK(std::is_sorted(s.points.begin(), s.points.end(),
                         [](const IndexPoint& a, const IndexPoint& b) { return a.quarter < b.quarter; }));
  }
}

TEST_CASE("period change and buckets") {
  IndexSeries s{{"D1", PropertyType::Apartment, SizeClass::All}, {}};
  s.points = {{{2007, 1}, 5000.0, 12, false}, {{2012, 4}, 6500.0, 14, false}};
  CHECK(period_change(s, {2007, 1}, {2012, 4}) == doctest::Approx(30.0));
  CHECK(bucket_change(30.0) == "26-50");
  CHECK(bucket_change(-1.0) == "<=0");
  CHECK(bucket_change(0.0) == "<=0");
  CHECK(bucket_change(25.0) == "0-25");
  CHECK(bucket_change(50.0) == "26-50");
  CHECK(bucket_change(75.0) == "51-75");
  CHECK(bucket_change(100.0) == "76-100");
  CHECK(bucket_change(100.5) == ">100");
  try {
    period_change(s, {2007, 1}, {2011, 4});
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("2011Q4") != std::string::npos);
  }
}

TEST_CASE("series round trip through csv") {
  IndexSeries s{{"D7", PropertyType::House, SizeClass::Medium}, {}};
  s.points = {{{2005, 1}, 1234567.5, 11, false}, {{2005, 2}, 0.1 + 0.2, 3, true}};
  std::ostringstream out;
  write_series(out, {s});
  std::istringstream in(out.str());
  const auto back = read_series(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0].cell == s.cell);
  CHECK(back[0].points == s.points);
}
