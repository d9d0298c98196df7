#pragma once

#include <cmath>
#include <compare>
#include <optional>
#include <string>

namespace bubble {

/// Calendar quarter. Ordered by (year, q).
struct Quarter {
  int year = 2005;
  int q = 1;  // 1..4

  constexpr auto operator<=>(const Quarter&) const = default;

  constexpr Quarter next() const { return q == 4 ? Quarter{year + 1, 1} : Quarter{year, q + 1}; }
  constexpr Quarter prev() const { return q == 1 ? Quarter{year - 1, 4} : Quarter{year, q - 1}; }

  /// Quarter-midpoint time in fractional years.
  constexpr double time() const { return year + (q - 0.5) / 4.0; }

  /// Linear index; differences count quarters.
  constexpr long ordinal() const { return static_cast<long>(year) * 4 + (q - 1); }
  static constexpr Quarter from_ordinal(long k) {
    long y = k >= 0 ? k / 4 : -((-k + 3) / 4);
    return Quarter{static_cast<int>(y), static_cast<int>(k - y * 4) + 1};
  }

  /// The quarter whose half-open interval [year + (q-1)/4, year + q/4) contains t.
  static Quarter containing(double t) {
    return from_ordinal(static_cast<long>(std::floor(t * 4.0)));
  }

  constexpr bool valid() const { return q >= 1 && q <= 4; }

  std::string str() const { return std::to_string(year) + "Q" + std::to_string(q); }

  /// Accepts "2012Q4" / "2012-Q4" / "2012 Q4".
  static std::optional<Quarter> parse(const std::string& s);
};

struct QuarterRange {
  Quarter first{2005, 1};
  Quarter last{2012, 4};

  constexpr bool contains(Quarter x) const { return first <= x && x <= last; }
};

}  // namespace bubble
