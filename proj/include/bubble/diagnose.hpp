#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bubble/bootstrap.hpp"
#include "bubble/index.hpp"
#include "bubble/lppl.hpp"

namespace bubble::diagnose {

/// Ordered by severity.
enum class Verdict { None = 0, Burst = 1, Critical = 2 };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

struct DistrictDiagnosis {
  index::IndexCell cell;
  Verdict verdict = Verdict::None;
  std::optional<double> tc;  // point estimate, qualified fits only
  std::optional<lppl::TcInterval> tc_interval;
  std::optional<std::pair<Quarter, Quarter>> critical_window;
};

struct WindowConfig {
  double tc_horizon_years = 2.0;
  double tc_lookback_years = 2.0;
};

/// Critical when the qualified fit puts tc after the last observation, Burst
/// when at or before it, None for an unqualified fit. The window covers the
/// interval, clipped to the future (Critical) or the lookback (Burst).
DistrictDiagnosis diagnose_series(const index::IndexCell& cell, const lppl::FitResult& fit,
                                  const std::optional<lppl::TcInterval>& interval, double t_last,
                                  const WindowConfig& config = {});

struct DistrictSummary {
  std::string district_id;
  Verdict verdict = Verdict::None;
  std::vector<DistrictDiagnosis> cells;  // the cells carrying the district verdict
};

struct Report {
  std::vector<DistrictSummary> districts;  // by district id
  std::size_t critical = 0;
  std::size_t burst = 0;
  std::size_t none = 0;

  std::vector<const DistrictSummary*> with(Verdict v) const;
};

/// Worst verdict per district, with supporting cells and verdict counts.
Report aggregate_report(const std::vector<DistrictDiagnosis>& diagnoses);

void write_diagnoses(std::ostream& out, const std::vector<DistrictDiagnosis>& diagnoses);

}  // namespace bubble::diagnose
