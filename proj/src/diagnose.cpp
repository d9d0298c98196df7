#include "bubble/diagnose.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "bubble/csv.hpp"

namespace bubble::diagnose {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Critical: return "Critical";
    case Verdict::Burst: return "Burst";
    case Verdict::None: return "None";
  }
  return "None";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::None, Verdict::Burst, Verdict::Critical})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

DistrictDiagnosis diagnose_series(const index::IndexCell& cell, const lppl::FitResult& fit,
                                  const std::optional<lppl::TcInterval>& interval, double t_last,
                                  const WindowConfig& config) {
  DistrictDiagnosis d;
  d.cell = cell;
  if (!fit.qualified()) return d;

  d.tc = fit.params.tc;
  d.verdict = fit.params.tc > t_last ? Verdict::Critical : Verdict::Burst;
  d.tc_interval = interval;
  if (!interval) return d;

  // end of the last observed quarter
  const double observed_end = Quarter::containing(t_last).next().time() - 0.125;
  double lo, hi;
  if (d.verdict == Verdict::Critical) {
    const double cap = t_last + config.tc_horizon_years;
    lo = std::clamp(interval->lo, observed_end, cap);
    hi = std::clamp(interval->hi, observed_end, cap);
  } else {
    const double floor = t_last - config.tc_lookback_years;
    lo = std::clamp(interval->lo, floor, t_last);
    hi = std::clamp(interval->hi, floor, t_last);
  }
  d.critical_window = std::make_pair(Quarter::containing(lo), Quarter::containing(hi));
  return d;
}

std::vector<const DistrictSummary*> Report::with(Verdict v) const {
  std::vector<const DistrictSummary*> out;
  for (const auto& d : districts)
    if (d.verdict == v) out.push_back(&d);
  return out;
}

Report aggregate_report(const std::vector<DistrictDiagnosis>& diagnoses) {
  std::map<std::string, DistrictSummary> by_district;
  for (const auto& d : diagnoses) {
    auto& s = by_district[d.cell.district_id];
    s.district_id = d.cell.district_id;
    if (s.cells.empty() || d.verdict > s.verdict) {
      s.verdict = d.verdict;
      s.cells.clear();
    }
    if (d.verdict == s.verdict) s.cells.push_back(d);
  }
  Report r;
  for (auto& [id, s] : by_district) {
    std::sort(s.cells.begin(), s.cells.end(),
              [](const DistrictDiagnosis& a, const DistrictDiagnosis& b) { return a.cell < b.cell; });
    switch (s.verdict) {
      case Verdict::Critical: ++r.critical; break;
      case Verdict::Burst: ++r.burst; break;
      case Verdict::None: ++r.none; break;
    }
    r.districts.push_back(std::move(s));
  }
  return r;
}

void write_diagnoses(std::ostream& out, const std::vector<DistrictDiagnosis>& diagnoses) {
  csv::write_row(out, {"district_id", "type", "size", "verdict", "window_start", "window_end"});
  for (const auto& d : diagnoses) {
    csv::write_row(out, {d.cell.district_id, std::string(to_string(d.cell.property_type)),
                         std::string(index::to_string(d.cell.size)), std::string(to_string(d.verdict)),
                         d.critical_window ? d.critical_window->first.str() : "",
                         d.critical_window ? d.critical_window->second.str() : ""});
  }
}

}  // namespace bubble::diagnose
