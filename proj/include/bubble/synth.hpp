#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "bubble/dedup.hpp"
#include "bubble/index.hpp"
#include "bubble/lppl.hpp"

namespace bubble::synth {

struct SynthSpec {
  std::uint64_t seed = 1;

  // series generation
  int n_quarters = 32;
  Quarter first_quarter{2005, 1};
  lppl::Params params{};
  double noise_sigma = 0.0;     // fraction of the noiseless log-price range
  bool post_critical = false;   // allow tc inside the grid (mirrored post-peak regime)

  // corpus generation
  std::size_t n_listings = 1000;
  double dup_rate = 0.3;
  double perturbation_strength = 0.2;
  std::size_t max_labeled_pairs = 20000;
};

struct SeriesSample {
  index::IndexSeries series;
  lppl::Params truth;
  double noise_std = 0.0;  // absolute log-space standard deviation used
};

/// values = exp(model + N(0, (noise_sigma * log-range)^2)) on a quarterly grid.
/// Throws PreconditionError when a grid time reaches tc and post_critical is off.
SeriesSample gen_lppl_series(const SynthSpec& spec);

/// Quarter-midpoint times of the spec's grid.
Eigen::VectorXd grid_times(const SynthSpec& spec);

struct ParamDraw {
  double tc_offset_min = 0.1;  // tc - t_last
  double tc_offset_max = 1.0;
  double m_min = 0.25, m_max = 0.75;
  double omega_min = 6.0, omega_max = 13.0;
  double b_min = 0.2, b_max = 0.5;  // |B|
  double c_ratio_min = 0.05, c_ratio_max = 0.2;  // sqrt(C1^2 + C2^2) / |B|
  double log_level = 8.3;
  double oscillation_margin = 0.5;  // above the fit config's minimum
};

/// Parameters that pass `config`'s qualification with margin on the given grid.
lppl::Params draw_qualified_params(std::mt19937_64& rng, const Eigen::VectorXd& t, const ParamDraw& draw,
                                   const lppl::FitConfig& config);

struct Corpus {
  std::vector<Listing> listings;
  std::unordered_map<std::string, std::string> truth;  // listing id -> true cluster id
  std::vector<dedup::LabeledPair> labeled;
  std::size_t planted_duplicates = 0;
  std::size_t base_count = 0;
};

/// Random listings plus planted duplicates: each duplicate copies a base
/// listing's zip, quarter, type and price and perturbs title, description,
/// and space at `perturbation_strength`. Some bases are same-price siblings
/// in the same block with related text; these are hard negatives.
Corpus gen_listing_corpus(const SynthSpec& spec);

enum class Trend { Bubble, Linear };

struct MarketSpec {
  std::uint64_t seed = 7;
  std::size_t districts = 20;
  std::size_t districts_per_canton = 5;
  std::size_t bubbles = 3;  // districts with a planted LPPL bubble
  int n_quarters = 32;
  Quarter first_quarter{2005, 1};
  std::size_t listings_per_quarter = 40;
  double price_dispersion = 0.03;  // log-space spread of individual ads
  double bubble_tc_offset = 0.5;   // planted tc - t_last
  double dup_rate = 0.1;
  double perturbation_strength = 0.2;
};

struct PlantedDistrict {
  std::string district_id;
  Trend trend = Trend::Linear;
  lppl::Params params{};    // bubbles
  double base = 0.0;        // linear: CHF/m2 in the first quarter
  double slope = 0.0;       // linear: CHF/m2 per quarter
};

struct Market {
  Corpus corpus;
  std::vector<PlantedDistrict> planted;
};

/// Apartment listings (medium size) whose per-district median CHF/m2 follows
/// either a planted LPPL bubble or linear growth, with planted duplicates.
Market gen_market_corpus(const MarketSpec& spec);

}  // namespace bubble::synth
