#include "bubble/index.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "bubble/csv.hpp"

namespace bubble::index {

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::Small: return "Small";
    case SizeClass::Medium: return "Medium";
    case SizeClass::Large: return "Large";
    case SizeClass::All: return "All";
  }
  return "All";
}

std::optional<SizeClass> parse_size_class(std::string_view s) {
  for (auto c : {SizeClass::Small, SizeClass::Medium, SizeClass::Large, SizeClass::All})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

SizeClass classify_size(PropertyType type, double rooms) {
  if (!(rooms >= 1.0)) throw PreconditionError("rooms must be >= 1");
  const double small_max = type == PropertyType::House ? 4.5 : 3.5;
  if (rooms <= small_max) return SizeClass::Small;
  if (rooms <= small_max + 2.0) return SizeClass::Medium;
  return SizeClass::Large;
}

double listing_measure(const Listing& l) {
  const double price = static_cast<double>(l.price_chf);
  return l.property_type == PropertyType::House ? price : price / l.living_space_m2;
}

const IndexPoint* IndexSeries::find(Quarter q) const {
  auto it = std::lower_bound(points.begin(), points.end(), q,
                             [](const IndexPoint& p, Quarter x) { return p.quarter < x; });
  return it != points.end() && it->quarter == q ? &*it : nullptr;
}

SeriesBuilder::SeriesBuilder(const std::vector<Listing>& listings, IndexConfig config) : config_(config) {
  std::map<std::string, std::map<std::string, std::size_t>> canton_votes;
  for (const auto& l : listings) {
    const auto size = classify_size(l.property_type, l.rooms);
    const double v = listing_measure(l);
    district_[{l.district_id, l.property_type, size}][l.listed_quarter].push_back(v);
    canton_[{l.canton, l.property_type, size}][l.listed_quarter].push_back(v);
    ++canton_votes[l.district_id][l.canton];
  }
  // a district belongs to the canton most of its listings name; ties go to the smaller code
  for (const auto& [district, votes] : canton_votes) {
    auto best = std::max_element(votes.begin(), votes.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    canton_of_district_[district] = best->first;
  }
}

std::vector<IndexCell> SeriesBuilder::cells() const {
  std::vector<IndexCell> out;
  for (const auto& [key, quarters] : district_) {
    const auto& [district, type, size] = key;
    out.push_back({district, type, size});
    out.push_back({district, type, SizeClass::All});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IndexSeries SeriesBuilder::build(const IndexCell& cell) const {
  IndexSeries series{cell, {}};
  auto canton_it = canton_of_district_.find(cell.district_id);
  if (canton_it == canton_of_district_.end()) return series;
  const std::string& canton = canton_it->second;

  std::map<Quarter, std::vector<double>> district_values, canton_values;
  for (auto size : {SizeClass::Small, SizeClass::Medium, SizeClass::Large}) {
    if (!size_matches(cell.size, size)) continue;
    if (auto it = district_.find({cell.district_id, cell.property_type, size}); it != district_.end())
      for (const auto& [q, v] : it->second) district_values[q].insert(district_values[q].end(), v.begin(), v.end());
    if (auto it = canton_.find({canton, cell.property_type, size}); it != canton_.end())
      for (const auto& [q, v] : it->second) canton_values[q].insert(canton_values[q].end(), v.begin(), v.end());
  }

  for (const auto& [q, cvals] : canton_values) {
    auto dit = district_values.find(q);
    const std::size_t n = dit == district_values.end() ? 0 : dit->second.size();
    IndexPoint p{q, 0.0, n, n < config_.min_ads};
    p.value = p.fallback ? median(cvals) : median(dit->second);
    series.points.push_back(p);
  }
  return series;
}

IndexSeries build_series(const std::vector<Listing>& listings, const IndexCell& cell, const IndexConfig& config) {
  return SeriesBuilder(listings, config).build(cell);
}

std::vector<IndexSeries> build_all_series(const std::vector<Listing>& listings, const IndexConfig& config) {
  SeriesBuilder builder(listings, config);
  std::vector<IndexSeries> out;
  for (const auto& cell : builder.cells()) out.push_back(builder.build(cell));
  return out;
}

double period_change(const IndexSeries& series, Quarter from, Quarter to) {
  const IndexPoint* a = series.find(from);
  const IndexPoint* b = series.find(to);
  if (!a) throw PreconditionError("period_change: start quarter " + from.str() + " missing from series");
  if (!b) throw PreconditionError("period_change: end quarter " + to.str() + " missing from series");
  return 100.0 * (b->value - a->value) / a->value;
}

std::string bucket_change(double pct) {
  if (pct <= 0.0) return "<=0";
  if (pct <= 25.0) return "0-25";
  if (pct <= 50.0) return "26-50";
  if (pct <= 75.0) return "51-75";
  if (pct <= 100.0) return "76-100";
  return ">100";
}

std::vector<HeatmapRow> build_heatmap(const std::vector<IndexSeries>& series, const HeatmapConfig& config) {
  std::vector<HeatmapRow> rows;
  for (const auto& s : series) {
    const auto& c = s.cell;
    if (c.property_type == PropertyType::Apartment && c.size == SizeClass::All) {
      if (const auto* p = s.find(config.as_of))
        rows.push_back({c.district_id, "apartment_chf_per_m2", p->value, ""});
      if (s.find(config.change_from) && s.find(config.change_to)) {
        const double pct = period_change(s, config.change_from, config.change_to);
        rows.push_back({c.district_id, "apartment_change_pct", pct, bucket_change(pct)});
      }
    } else if (c.property_type == PropertyType::House && c.size == SizeClass::Medium) {
      if (const auto* p = s.find(config.as_of)) rows.push_back({c.district_id, "medium_house_chf", p->value, ""});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const HeatmapRow& a, const HeatmapRow& b) {
    return std::tie(a.metric, a.district_id) < std::tie(b.metric, b.district_id);
  });
  return rows;
}

void write_series(std::ostream& out, const std::vector<IndexSeries>& series) {
  csv::write_row(out, {"district_id", "property_type", "size", "year", "quarter", "value", "count", "fallback"});
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      csv::write_row(out, {s.cell.district_id, std::string(to_string(s.cell.property_type)),
                           std::string(to_string(s.cell.size)), std::to_string(p.quarter.year),
                           std::to_string(p.quarter.q), csv::format_double(p.value), std::to_string(p.count),
                           p.fallback ? "1" : "0"});
    }
  }
}

namespace {
template <typename T>
T to_number(const std::string& s, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw IoError("series file line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}
}  // namespace

std::vector<IndexSeries> read_series(std::istream& in) {
  csv::Reader reader(in);
  csv::Record rec;
  if (!reader.next(rec) || rec.fields.size() != 8 || rec.fields[0] != "district_id")
    throw IoError("series file lacks the expected header");
  std::map<IndexCell, IndexSeries> by_cell;
  while (reader.next(rec)) {
    const auto& f = rec.fields;
    if (f.size() != 8) throw IoError("series file line " + std::to_string(rec.line_no) + ": expected 8 fields");
    auto type = parse_property_type(f[1]);
    auto size = parse_size_class(f[2]);
    if (!type || !size) throw IoError("series file line " + std::to_string(rec.line_no) + ": bad cell key");
    IndexCell cell{f[0], *type, *size};
    IndexPoint p;
    p.quarter = Quarter{to_number<int>(f[3], rec.line_no), to_number<int>(f[4], rec.line_no)};
    p.value = to_number<double>(f[5], rec.line_no);
    p.count = to_number<std::size_t>(f[6], rec.line_no);
    p.fallback = f[7] == "1";
    auto& s = by_cell[cell];
    s.cell = cell;
    s.points.push_back(p);
  }
  std::vector<IndexSeries> out;
  for (auto& [cell, s] : by_cell) {
    std::sort(s.points.begin(), s.points.end(),
              [](const IndexPoint& a, const IndexPoint& b) { return a.quarter < b.quarter; });
    out.push_back(std::move(s));
  }
  return out;
}

void write_heatmap(std::ostream& out, const std::vector<HeatmapRow>& rows) {
  csv::write_row(out, {"district_id", "metric", "value", "bucket"});
  for (const auto& r : rows) csv::write_row(out, {r.district_id, r.metric, csv::format_double(r.value), r.bucket});
}

}  // namespace bubble::index
