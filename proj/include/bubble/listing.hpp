#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bubble/quarter.hpp"

namespace bubble {

enum class PropertyType { House, Apartment };

std::string_view to_string(PropertyType t);
std::optional<PropertyType> parse_property_type(std::string_view s);

/// One classified ad.
struct Listing {
  std::string id;
  std::string source_portal;
  std::string zip;
  std::string district_id;
  std::string canton;
  PropertyType property_type = PropertyType::Apartment;
  double rooms = 1.0;
  std::int64_t price_chf = 0;
  double living_space_m2 = 0.0;
  std::string title;
  std::string description;
  Quarter listed_quarter;

  bool operator==(const Listing&) const = default;
};

/// Fractional-year time of the listing's quarter midpoint.
inline double listing_time(const Listing& l) { return l.listed_quarter.time(); }

}  // namespace bubble
