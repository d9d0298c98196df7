#include "bubble/ingest.hpp"

#include <charconv>
#include <cmath>
#include <unordered_set>

#include "bubble/csv.hpp"
#include "bubble/error.hpp"

namespace bubble::ingest {

namespace {

template <typename T>
bool parse_number(const std::string& s, T& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && p == last;
}

bool is_zip(const std::string& s) {
  if (s.size() != 4) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

struct RowError {
  RejectReason reason;
  std::string detail;
};

}  // namespace

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::NonPositivePrice: return "NonPositivePrice";
    case RejectReason::NonPositiveSpace: return "NonPositiveSpace";
    case RejectReason::MalformedField: return "MalformedField";
    case RejectReason::OutOfWindow: return "OutOfWindow";
  }
  return "MalformedField";
}

IngestResult parse_listings(std::istream& source, const QuarterRange& window) {
  if (!source) throw IoError("listing stream is not readable");

  csv::Reader reader(source);
  csv::Record rec;
  if (!reader.next(rec)) {
    if (source.bad()) throw IoError("failed reading listing stream");
    throw IoError("listing stream has no header row");
  }
  if (rec.fields.size() != kListingColumns.size()) throw IoError("listing header has wrong column count");
  for (std::size_t i = 0; i < kListingColumns.size(); ++i) {
    if (rec.fields[i] != kListingColumns[i]) {
      throw IoError("listing header column " + std::to_string(i + 1) + " is '" + rec.fields[i] +
                    "', expected '" + std::string(kListingColumns[i]) + "'");
    }
  }

  IngestResult result;
  std::unordered_set<std::string> seen_ids;

  while (reader.next(rec)) {
    auto reject = [&](RejectReason reason, std::string detail) {
      result.rejects.push_back({rec.line_no, reason, rec.fields, std::move(detail)});
    };
    if (rec.malformed) {
      reject(RejectReason::MalformedField, "unterminated quote");
      continue;
    }
    const auto& f = rec.fields;
    if (f.size() != kListingColumns.size()) {
      reject(RejectReason::MalformedField, "expected 13 fields, got " + std::to_string(f.size()));
      continue;
    }

    Listing l;
    l.id = f[0];
    l.source_portal = f[1];
    l.zip = f[2];
    l.district_id = f[3];
    l.canton = f[4];
    l.title = f[9];
    l.description = f[10];

    std::int64_t price = 0;
    double space = 0.0;
    int year = 0, q = 0;
    auto type = parse_property_type(f[5]);

    if (l.id.empty()) { reject(RejectReason::MalformedField, "empty id"); continue; }
    if (!is_zip(l.zip)) { reject(RejectReason::MalformedField, "zip must be 4 digits"); continue; }
    if (l.district_id.empty()) { reject(RejectReason::MalformedField, "empty district_id"); continue; }
    if (l.canton.size() != 2) { reject(RejectReason::MalformedField, "canton must be 2 letters"); continue; }
    if (!type) { reject(RejectReason::MalformedField, "unknown property_type"); continue; }
    l.property_type = *type;
    if (!parse_number(f[6], l.rooms) || !std::isfinite(l.rooms) || l.rooms < 1.0 ||
        std::fmod(l.rooms * 2.0, 1.0) != 0.0) {
      reject(RejectReason::MalformedField, "rooms must be a half-step value >= 1");
      continue;
    }
    if (!parse_number(f[7], price)) { reject(RejectReason::MalformedField, "price_chf not an integer"); continue; }
    if (!parse_number(f[8], space) || std::isnan(space)) {
      reject(RejectReason::MalformedField, "living_space_m2 not a number");
      continue;
    }
    if (!parse_number(f[11], year) || !parse_number(f[12], q) || q < 1 || q > 4) {
      reject(RejectReason::MalformedField, "bad year/quarter");
      continue;
    }
    l.listed_quarter = Quarter{year, q};

    if (price <= 0) { reject(RejectReason::NonPositivePrice, ""); continue; }
    if (!(space > 0.0) || !std::isfinite(space)) { reject(RejectReason::NonPositiveSpace, ""); continue; }
    if (!window.contains(l.listed_quarter)) { reject(RejectReason::OutOfWindow, l.listed_quarter.str()); continue; }
    if (!seen_ids.insert(l.id).second) { reject(RejectReason::MalformedField, "duplicate id"); continue; }

    l.price_chf = price;
    l.living_space_m2 = space;
    result.listings.push_back(std::move(l));
  }
  if (source.bad()) throw IoError("failed reading listing stream");
  return result;
}

std::vector<std::string> to_fields(const Listing& l) {
  return {l.id,
          l.source_portal,
          l.zip,
          l.district_id,
          l.canton,
          std::string(to_string(l.property_type)),
          csv::format_double(l.rooms),
          std::to_string(l.price_chf),
          csv::format_double(l.living_space_m2),
          l.title,
          l.description,
          std::to_string(l.listed_quarter.year),
          std::to_string(l.listed_quarter.q)};
}

void write_listings(std::ostream& out, const std::vector<Listing>& listings) {
  csv::write_row(out, {kListingColumns.begin(), kListingColumns.end()});
  for (const auto& l : listings) csv::write_row(out, to_fields(l));
}

void write_rejects(std::ostream& out, const std::vector<RejectRecord>& rejects) {
  std::vector<std::string> header{kListingColumns.begin(), kListingColumns.end()};
  header.emplace_back("raw_line_no");
  header.emplace_back("reason");
  csv::write_row(out, header);
  for (const auto& r : rejects) {
    auto row = r.raw_fields;
    row.resize(kListingColumns.size());
    row.push_back(std::to_string(r.raw_line_no));
    row.emplace_back(to_string(r.reason));
    csv::write_row(out, row);
  }
}

}  // namespace bubble::ingest
