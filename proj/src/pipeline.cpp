#include "bubble/pipeline.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>

#include "bubble/csv.hpp"
#include "bubble/parallel.hpp"

namespace bubble::pipeline {

std::uint64_t cell_seed(std::uint64_t run_seed, const index::IndexCell& cell) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  const std::string key = cell.district_id + '\x1f' + std::string(to_string(cell.property_type)) + '\x1f' +
                          std::string(index::to_string(cell.size));
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return lppl::mix_seed(run_seed, h);
}

std::vector<FitRecord> fit_all(const std::vector<index::IndexSeries>& series, const RunConfig& config) {
  std::vector<FitRecord> records(series.size());
  parallel_for(series.size(), config.jobs, [&](std::size_t i) {
    auto& rec = records[i];
    rec.cell = series[i].cell;
    rec.seed = cell_seed(config.seed, rec.cell);
    lppl::FitConfig fc = config.fit;
    fc.seed = rec.seed;
    rec.observed = lppl::to_log_series(series[i], fc.use_fallback);
    rec.n_points = static_cast<std::size_t>(rec.observed.size());
    if (rec.n_points < std::max<std::size_t>(fc.min_points, 4)) {
      rec.skipped = "too_few_points";
      return;
    }
    rec.fit = lppl::fit_lppl(rec.observed, fc);
    if (!rec.fit.qualified()) return;
    try {
      rec.bootstrap = lppl::bootstrap_tc(rec.observed, rec.fit, fc);
    } catch (const lppl::BootstrapError& e) {
      rec.bootstrap_error = e.what();
    }
  });
  std::stable_sort(records.begin(), records.end(),
                   [](const FitRecord& a, const FitRecord& b) { return a.cell < b.cell; });
  return records;
}

void write_config_header(std::ostream& out, const std::string& stage, const RunConfig& config) {
  out << "# bubble " << stage << '\n';
  for (const auto& [k, v] : config.entries()) out << "# " << k << " = " << v << '\n';
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : config.entries()) j[k] = v;
  return j;
}

namespace {

std::vector<std::string> cell_fields(const index::IndexCell& c) {
  return {c.district_id, std::string(to_string(c.property_type)), std::string(index::to_string(c.size))};
}

const std::vector<std::string> kFitColumns = {
    "district_id", "property_type", "size",   "n_points", "t_first", "t_last",  "tc",       "m",
    "omega",       "A",             "B",      "C1",       "C2",      "sse",     "oscillations", "qualified",
    "reasons",     "tc_lo",         "tc_hi",  "bootstrap_kept", "bootstrap_failed", "bootstrap_note", "seed"};

double number(const std::string& s, std::size_t line) {
  if (s.empty()) return 0.0;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw IoError("fit report line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::uint32_t parse_reasons(const std::string& s) {
  if (s == "qualified") return lppl::kQualified;
  std::uint32_t bits = 0;
  for (std::uint32_t b = 1; b <= lppl::kNoValidStart; b <<= 1)
    if (s.find(lppl::reasons_to_string(b)) != std::string::npos) bits |= b;
  return bits ? bits : lppl::kNoValidStart;
}

}  // namespace

void write_fit_report(std::ostream& out, const std::vector<FitRecord>& records) {
  auto d = [](double v) { return csv::format_double(v); };
  csv::write_row(out, kFitColumns);
  for (const auto& r : records) {
    auto row = cell_fields(r.cell);
    row.push_back(std::to_string(r.n_points));
    if (!r.skipped.empty()) {
      row.insert(row.end(), {"", "", "", "", "", "", "", "", "", "", "", "0", r.skipped, "", "", "0", "0", "",
                             std::to_string(r.seed)});
      csv::write_row(out, row);
      continue;
    }
    const auto& p = r.fit.params;
    row.insert(row.end(), {d(r.fit.t_first), d(r.fit.t_last), d(p.tc), d(p.m), d(p.omega), d(p.a), d(p.b), d(p.c1),
                           d(p.c2), d(r.fit.sse), d(r.fit.oscillations), r.fit.qualified() ? "1" : "0",
                           lppl::reasons_to_string(r.fit.reasons)});
    if (r.bootstrap) {
      row.insert(row.end(), {d(r.bootstrap->interval.lo), d(r.bootstrap->interval.hi),
                             std::to_string(r.bootstrap->replicates.size()), std::to_string(r.bootstrap->failed), ""});
    } else {
      row.insert(row.end(), {"", "", "0", "0", r.bootstrap_error});
    }
    row.push_back(std::to_string(r.seed));
    csv::write_row(out, row);
  }
}

std::vector<FitRow> read_fit_report(std::istream& in) {
  csv::Reader reader(in);
  csv::Record rec;
  if (!reader.next(rec) || rec.fields != kFitColumns) throw IoError("fit report lacks the expected header");
  std::vector<FitRow> rows;
  while (reader.next(rec)) {
    const auto& f = rec.fields;
    if (f.size() != kFitColumns.size())
      throw IoError("fit report line " + std::to_string(rec.line_no) + ": wrong field count");
    auto type = parse_property_type(f[1]);
    auto size = index::parse_size_class(f[2]);
    if (!type || !size) throw IoError("fit report line " + std::to_string(rec.line_no) + ": bad cell key");
    FitRow row;
    row.cell = {f[0], *type, *size};
    const auto line = rec.line_no;
    row.fit.n_points = static_cast<std::size_t>(number(f[3], line));
    row.fit.t_first = number(f[4], line);
    row.fit.t_last = number(f[5], line);
    row.fit.params = {number(f[6], line),  number(f[7], line),  number(f[8], line), number(f[9], line),
                      number(f[10], line), number(f[11], line), number(f[12], line)};
    row.fit.sse = number(f[13], line);
    row.fit.oscillations = number(f[14], line);
    row.fit.reasons = f[15] == "1" ? lppl::kQualified : parse_reasons(f[16]);
    if (!f[17].empty() && !f[18].empty()) row.interval = lppl::TcInterval{number(f[17], line), number(f[18], line), 0.80};
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_plot_series(std::ostream& out, const std::vector<FitRecord>& records) {
  csv::write_row(out, {"district_id", "property_type", "size", "t", "observed_log", "fitted_log"});
  for (const auto& r : records) {
    if (!r.skipped.empty()) continue;
    for (Eigen::Index i = 0; i < r.observed.size(); ++i) {
      auto row = cell_fields(r.cell);
      row.push_back(csv::format_double(r.observed.t(i)));
      row.push_back(csv::format_double(r.observed.y(i)));
      row.push_back(i < r.fit.fitted.size() ? csv::format_double(r.fit.fitted(i)) : "");
      csv::write_row(out, row);
    }
  }
}

void write_plot_scenarios(std::ostream& out, const std::vector<FitRecord>& records, int horizon_quarters) {
  csv::write_row(out, {"district_id", "property_type", "size", "path", "tc", "t", "log_value"});
  for (const auto& r : records) {
    if (!r.skipped.empty() || !r.fit.qualified()) continue;
    const std::vector<lppl::Params> none;
    const auto paths = lppl::scenario_paths(r.fit, r.bootstrap ? r.bootstrap->replicates : none, horizon_quarters);
    for (std::size_t k = 0; k < paths.size(); ++k) {
      for (std::size_t i = 0; i < paths[k].t.size(); ++i) {
        auto row = cell_fields(r.cell);
        row.insert(row.end(), {std::to_string(k), csv::format_double(paths[k].tc), csv::format_double(paths[k].t[i]),
                               csv::format_double(paths[k].y[i])});
        csv::write_row(out, row);
      }
    }
  }
}

std::vector<diagnose::DistrictDiagnosis> diagnose_all(const std::vector<FitRow>& rows, const RunConfig& config) {
  std::vector<diagnose::DistrictDiagnosis> out;
  const diagnose::WindowConfig window{config.fit.tc_horizon_years, config.fit.tc_lookback_years};
  for (const auto& r : rows) out.push_back(diagnose::diagnose_series(r.cell, r.fit, r.interval, r.fit.t_last, window));
  return out;
}

nlohmann::json report_json(const diagnose::Report& report, const RunConfig& config) {
  auto list = [&](diagnose::Verdict v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto* d : report.with(v)) {
      nlohmann::json cells = nlohmann::json::array();
      for (const auto& c : d->cells) {
        nlohmann::json cell = {{"property_type", std::string(to_string(c.cell.property_type))},
                               {"size", std::string(index::to_string(c.cell.size))}};
        cell["tc"] = c.tc ? nlohmann::json(*c.tc) : nlohmann::json(nullptr);
        cell["window_start"] = c.critical_window ? nlohmann::json(c.critical_window->first.str()) : nlohmann::json(nullptr);
        cell["window_end"] = c.critical_window ? nlohmann::json(c.critical_window->second.str()) : nlohmann::json(nullptr);
        cells.push_back(std::move(cell));
      }
      arr.push_back({{"district_id", d->district_id}, {"cells", std::move(cells)}});
    }
    return arr;
  };
  nlohmann::json j;
  j["config"] = config_json(config);
  j["critical"] = list(diagnose::Verdict::Critical);
  j["watch"] = list(diagnose::Verdict::Burst);
  j["counts"] = {{"critical", report.critical}, {"burst", report.burst}, {"none", report.none}};
  return j;
}

}  // namespace bubble::pipeline
