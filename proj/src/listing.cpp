#include "bubble/listing.hpp"

#include <cctype>
#include <charconv>

#include "bubble/quarter.hpp"

namespace bubble {

std::optional<Quarter> Quarter::parse(const std::string& s) {
  // YYYY, optional separator, 'Q' or 'q', digit
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  int year = 0;
  auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), year);
  if (ec != std::errc{}) return std::nullopt;
  std::size_t j = static_cast<std::size_t>(p - s.data());
  while (j < s.size() && (s[j] == '-' || s[j] == ' ')) ++j;
  if (j >= s.size() || (s[j] != 'Q' && s[j] != 'q')) return std::nullopt;
  ++j;
  if (j + 1 != s.size() || s[j] < '1' || s[j] > '4') return std::nullopt;
  return Quarter{year, s[j] - '0'};
}

std::string_view to_string(PropertyType t) {
  return t == PropertyType::House ? "House" : "Apartment";
}

std::optional<PropertyType> parse_property_type(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "house") return PropertyType::House;
  if (lower == "apartment") return PropertyType::Apartment;
  return std::nullopt;
}

}  // namespace bubble
