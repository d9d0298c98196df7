#include "bubble/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bubble/csv.hpp"
#include "bubble/error.hpp"

namespace bubble {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw PreconditionError("config key '" + key + "': cannot parse '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw PreconditionError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

Quarter parse_quarter(const std::string& key, const std::string& v) {
  auto q = Quarter::parse(v);
  if (!q) throw PreconditionError("config key '" + key + "': expected a quarter like 2012Q4, got '" + v + "'");
  return *q;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += csv::format_double(v[i]);
  }
  return s;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_value<double>(key, tok));
  if (out.empty()) throw PreconditionError("config key '" + key + "': empty list");
  return out;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  auto& f = fit;
  if (key == "window_start") window.first = parse_quarter(key, value);
  else if (key == "window_end") window.last = parse_quarter(key, value);
  else if (key == "min_ads") index.min_ads = parse_value<std::size_t>(key, value);
  else if (key == "change_from") heatmap.change_from = parse_quarter(key, value);
  else if (key == "change_to") heatmap.change_to = parse_quarter(key, value);
  else if (key == "as_of") heatmap.as_of = parse_quarter(key, value);
  else if (key == "min_points") f.min_points = parse_value<std::size_t>(key, value);
  else if (key == "m_min") f.m_min = parse_value<double>(key, value);
  else if (key == "m_max") f.m_max = parse_value<double>(key, value);
  else if (key == "omega_min") f.omega_min = parse_value<double>(key, value);
  else if (key == "omega_max") f.omega_max = parse_value<double>(key, value);
  else if (key == "tc_horizon_years") f.tc_horizon_years = parse_value<double>(key, value);
  else if (key == "tc_lookback_years") f.tc_lookback_years = parse_value<double>(key, value);
  else if (key == "min_oscillations") f.min_oscillations = parse_value<double>(key, value);
  else if (key == "bootstrap_replicates") f.bootstrap_replicates = parse_value<std::size_t>(key, value);
  else if (key == "bootstrap_max_failure") f.bootstrap_max_failure = parse_value<double>(key, value);
  else if (key == "bootstrap_starts") f.bootstrap_starts = parse_value<std::size_t>(key, value);
  else if (key == "fit_use_fallback") f.use_fallback = parse_bool(key, value);
  else if (key == "grid_tc_offsets") f.grid_tc_offsets = parse_list(key, value);
  else if (key == "grid_m") f.grid_m = parse_list(key, value);
  else if (key == "grid_omega") f.grid_omega = parse_list(key, value);
  else if (key == "start_max_evals") f.start_max_evals = parse_value<int>(key, value);
  else if (key == "polish_max_evals") f.polish_max_evals = parse_value<int>(key, value);
  else if (key == "polish_candidates") f.polish_candidates = parse_value<std::size_t>(key, value);
  else if (key == "svm_lambda") svm.lambda = parse_value<double>(key, value);
  else if (key == "svm_epochs") svm.epochs = parse_value<int>(key, value);
  else if (key == "scenario_horizon_quarters") scenario_horizon_quarters = parse_value<int>(key, value);
  else if (key == "jobs") jobs = parse_value<unsigned>(key, value);
  else if (key == "seed") {
    seed = parse_value<std::uint64_t>(key, value);
  } else {
    throw PreconditionError("unknown config key '" + key + "'");
  }
}

void RunConfig::apply_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw PreconditionError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const PreconditionError& e) {
      throw PreconditionError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::map<std::string, std::string> RunConfig::entries() const {
  const auto& f = fit;
  auto d = [](double v) { return csv::format_double(v); };
  return {
      {"window_start", window.first.str()},
      {"window_end", window.last.str()},
      {"min_ads", std::to_string(index.min_ads)},
      {"change_from", heatmap.change_from.str()},
      {"change_to", heatmap.change_to.str()},
      {"as_of", heatmap.as_of.str()},
      {"min_points", std::to_string(f.min_points)},
      {"m_min", d(f.m_min)},
      {"m_max", d(f.m_max)},
      {"omega_min", d(f.omega_min)},
      {"omega_max", d(f.omega_max)},
      {"tc_horizon_years", d(f.tc_horizon_years)},
      {"tc_lookback_years", d(f.tc_lookback_years)},
      {"min_oscillations", d(f.min_oscillations)},
      {"bootstrap_replicates", std::to_string(f.bootstrap_replicates)},
      {"bootstrap_max_failure", d(f.bootstrap_max_failure)},
      {"bootstrap_starts", std::to_string(f.bootstrap_starts)},
      {"fit_use_fallback", f.use_fallback ? "true" : "false"},
      {"grid_tc_offsets", join_doubles(f.grid_tc_offsets)},
      {"grid_m", join_doubles(f.grid_m)},
      {"grid_omega", join_doubles(f.grid_omega)},
      {"start_max_evals", std::to_string(f.start_max_evals)},
      {"polish_max_evals", std::to_string(f.polish_max_evals)},
      {"polish_candidates", std::to_string(f.polish_candidates)},
      {"svm_lambda", d(svm.lambda)},
      {"svm_epochs", std::to_string(svm.epochs)},
      {"scenario_horizon_quarters", std::to_string(scenario_horizon_quarters)},
      {"seed", std::to_string(seed)},
  };
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  c.apply_text(ss.str());
  return c;
}

}  // namespace bubble
