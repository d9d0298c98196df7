#pragma once

#include <algorithm>
#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/listing.hpp"

namespace bubble::index {

enum class SizeClass { Small, Medium, Large, All };

std::string_view to_string(SizeClass s);
std::optional<SizeClass> parse_size_class(std::string_view s);

/// Room-count size class. Houses: <=4.5 small, 5..6.5 medium, >=7 large.
/// Apartments: <=3.5 small, 4..5.5 medium, >=6 large.
SizeClass classify_size(PropertyType type, double rooms);

/// True when a listing of the given size falls into `cell_size` (All pools every size).
inline bool size_matches(SizeClass cell_size, SizeClass listing_size) {
  return cell_size == SizeClass::All || cell_size == listing_size;
}

/// Median; even counts average the two middle order statistics.
template <typename Scalar>
Scalar median(std::span<const Scalar> values) {
  if (values.empty()) throw PreconditionError("median of an empty sample");
  std::vector<Scalar> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const Scalar upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const Scalar lower = *std::max_element(v.begin(), v.begin() + mid);
  return (lower + upper) / Scalar(2);
}

template <typename Scalar>
Scalar median(const std::vector<Scalar>& values) {
  return median(std::span<const Scalar>(values));
}

struct IndexCell {
  std::string district_id;
  PropertyType property_type = PropertyType::Apartment;
  SizeClass size = SizeClass::All;

  auto operator<=>(const IndexCell&) const = default;
};

struct IndexPoint {
  Quarter quarter;
  double value = 0.0;   // CHF for houses, CHF/m2 for apartments
  std::size_t count = 0;  // district listings behind the point
  bool fallback = false;  // cantonal median substituted

  bool operator==(const IndexPoint&) const = default;
};

struct IndexSeries {
  IndexCell cell;
  std::vector<IndexPoint> points;  // strictly increasing quarters

  const IndexPoint* find(Quarter q) const;
};

struct IndexConfig {
  std::size_t min_ads = 10;
};

/// Per-listing measure: price for houses, price per m2 for apartments.
double listing_measure(const Listing& l);

/// Indexes deduplicated listings once so many cells can be built cheaply.
class SeriesBuilder {
 public:
  SeriesBuilder(const std::vector<Listing>& listings, IndexConfig config);

  IndexSeries build(const IndexCell& cell) const;

  /// Every (district, type, size) cell with at least one listing, All included, in key order.
  std::vector<IndexCell> cells() const;

 private:
  using Key = std::tuple<std::string, PropertyType, SizeClass>;  // region, type, size (never All)
  IndexConfig config_;
  std::map<Key, std::map<Quarter, std::vector<double>>> district_;
  std::map<Key, std::map<Quarter, std::vector<double>>> canton_;
  std::map<std::string, std::string> canton_of_district_;
};

/// Quarterly median series for one cell; quarters with fewer than min_ads
/// district listings take the cantonal median and are flagged.
IndexSeries build_series(const std::vector<Listing>& listings, const IndexCell& cell, const IndexConfig& config);

std::vector<IndexSeries> build_all_series(const std::vector<Listing>& listings, const IndexConfig& config);

/// 100 * (v_to - v_from) / v_from. Throws PreconditionError naming the missing endpoint.
double period_change(const IndexSeries& series, Quarter from, Quarter to);

/// One of "<=0", "0-25", "26-50", "51-75", "76-100", ">100"; upper edges inclusive.
std::string bucket_change(double pct);

struct HeatmapRow {
  std::string district_id;
  std::string metric;
  double value = 0.0;
  std::string bucket;
};

struct HeatmapConfig {
  Quarter change_from{2007, 1};
  Quarter change_to{2012, 4};
  Quarter as_of{2012, 4};
};

/// District-level map data: apartment CHF/m2 and medium-house CHF at `as_of`,
/// and the apartment CHF/m2 change between the two change quarters.
std::vector<HeatmapRow> build_heatmap(const std::vector<IndexSeries>& series, const HeatmapConfig& config);

void write_series(std::ostream& out, const std::vector<IndexSeries>& series);
std::vector<IndexSeries> read_series(std::istream& in);
void write_heatmap(std::ostream& out, const std::vector<HeatmapRow>& rows);

}  // namespace bubble::index
