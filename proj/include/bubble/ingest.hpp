#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/listing.hpp"
#include "bubble/quarter.hpp"

namespace bubble::ingest {

inline constexpr std::array<std::string_view, 13> kListingColumns = {
    "id",    "source_portal",   "zip",   "district_id", "canton",      "property_type", "rooms",
    "price_chf", "living_space_m2", "title", "description", "year",    "quarter"};

enum class RejectReason { NonPositivePrice, NonPositiveSpace, MalformedField, OutOfWindow };

std::string_view to_string(RejectReason r);

struct RejectRecord {
  std::size_t raw_line_no = 0;
  RejectReason reason = RejectReason::MalformedField;
  std::vector<std::string> raw_fields;
  std::string detail;
};

struct IngestResult {
  std::vector<Listing> listings;
  std::vector<RejectRecord> rejects;

  std::size_t row_count() const { return listings.size() + rejects.size(); }
};

/// Parses the listing table and applies the admission filters. Every data row
/// lands in exactly one of the two outputs. Throws IoError when the stream
/// cannot be read or the header does not match kListingColumns.
IngestResult parse_listings(std::istream& source, const QuarterRange& window);

void write_listings(std::ostream& out, const std::vector<Listing>& listings);
void write_rejects(std::ostream& out, const std::vector<RejectRecord>& rejects);

std::vector<std::string> to_fields(const Listing& l);

}  // namespace bubble::ingest
