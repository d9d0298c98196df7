#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "bubble/index.hpp"
#include "bubble/lppl.hpp"
#include "bubble/quarter.hpp"
#include "bubble/svm.hpp"

namespace bubble {

/// Everything a pipeline run depends on. Serialized into every report.
struct RunConfig {
  QuarterRange window{{2005, 1}, {2012, 4}};
  index::IndexConfig index;
  index::HeatmapConfig heatmap;
  lppl::FitConfig fit;
  SvmConfig svm;
  int scenario_horizon_quarters = 8;
  unsigned jobs = 1;
  std::uint64_t seed = 42;

  /// Applies "key = value" lines; '#' starts a comment. Throws
  /// PreconditionError naming the line on an unknown key or bad value.
  void apply_text(const std::string& text);
  void set(const std::string& key, const std::string& value);

  /// Resolved configuration, keys sorted. `jobs` is excluded: it never
  /// changes results.
  std::map<std::string, std::string> entries() const;
};

RunConfig load_config_file(const std::string& path);

}  // namespace bubble
