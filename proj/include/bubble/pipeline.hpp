#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bubble/bootstrap.hpp"
#include "bubble/config.hpp"
#include "bubble/diagnose.hpp"
#include "bubble/index.hpp"
#include "bubble/lppl.hpp"

namespace bubble::pipeline {

/// Seed for one cell, derived from the run seed and the cell key so results
/// do not depend on processing order.
std::uint64_t cell_seed(std::uint64_t run_seed, const index::IndexCell& cell);

struct FitRecord {
  index::IndexCell cell;
  std::uint64_t seed = 0;
  std::size_t n_points = 0;
  std::string skipped;  // non-empty when the series could not be fitted
  lppl::FitResult fit;
  std::optional<lppl::BootstrapResult> bootstrap;
  std::string bootstrap_error;
  lppl::LogSeries observed;
};

/// Fits every series (bootstrapping qualified ones), in cell order.
std::vector<FitRecord> fit_all(const std::vector<index::IndexSeries>& series, const RunConfig& config);

/// `# key = value` header lines embedding the resolved configuration.
void write_config_header(std::ostream& out, const std::string& stage, const RunConfig& config);
nlohmann::json config_json(const RunConfig& config);

void write_fit_report(std::ostream& out, const std::vector<FitRecord>& records);

/// Fit report row as read back by the diagnose stage.
struct FitRow {
  index::IndexCell cell;
  lppl::FitResult fit;  // params, sse, reasons, t_first, t_last populated
  std::optional<lppl::TcInterval> interval;
};
std::vector<FitRow> read_fit_report(std::istream& in);

/// Observed and fitted log values per cell.
void write_plot_series(std::ostream& out, const std::vector<FitRecord>& records);
/// Scenario trajectories per qualified cell.
void write_plot_scenarios(std::ostream& out, const std::vector<FitRecord>& records, int horizon_quarters);

std::vector<diagnose::DistrictDiagnosis> diagnose_all(const std::vector<FitRow>& rows, const RunConfig& config);

/// Critical and watch (burst) district lists plus verdict counts.
nlohmann::json report_json(const diagnose::Report& report, const RunConfig& config);

}  // namespace bubble::pipeline
