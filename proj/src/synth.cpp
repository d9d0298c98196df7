#include "bubble/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace bubble::synth {

namespace {

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "helle",      "moderne",    "ruhige",     "sonnige",    "grosszuegige", "renovierte", "charmante",
      "wohnung",    "haus",       "balkon",     "terrasse",   "garten",       "seesicht",   "bergsicht",
      "lift",       "garage",     "parkplatz",  "keller",     "estrich",      "cheminee",   "parkett",
      "kueche",     "bad",        "dusche",     "wc",         "waschturm",    "reduit",     "neubau",
      "altbau",     "minergie",   "zentral",    "naehe",      "bahnhof",      "schule",     "einkauf",
      "bus",        "autobahn",   "familien",   "kinder",     "freundlich",   "quartier",   "dorf",
      "stadt",      "zentrum",    "aussicht",   "sitzplatz",  "wintergarten", "loggia",     "attika",
      "maisonette", "dachgeschoss", "erdgeschoss", "obergeschoss", "hochparterre", "bezug",  "sofort",
      "nach",       "vereinbarung", "verkauf",  "provisionsfrei", "eigentum",  "investition", "rendite",
      "anlage",     "wohnflaeche", "zimmer",    "raeume",     "offen",        "gestaltet",  "hochwertig",
      "ausbau",     "standard",   "boden",      "heizung",    "waermepumpe",  "fussbodenheizung", "fenster",
      "dreifach",   "verglasung", "storen",     "elektrisch", "geschirrspueler", "steamer",   "induktion",
      "granit",     "naturstein", "plattenboden", "laminat",  "teppich",      "einbauschraenke", "ankleide",
      "schlafzimmer", "wohnzimmer", "essbereich", "buero",    "hobbyraum",    "velo",       "spielplatz",
      "gemeinschaft", "ueberbauung", "residenz", "villa",     "chalet",       "bauernhaus", "reihenhaus",
      "doppelhaus", "einfamilienhaus", "mehrfamilienhaus", "grundstueck", "parzelle", "umschwung", "see",
      "fluss",      "wald",       "wiese",      "natur",      "erholung",     "ski",        "wandern",
      "golf",       "kultur",     "museum",     "theater",    "restaurant",   "cafe",       "markt",
      "preis",      "verhandlungsbasis", "besichtigung", "kontakt", "termin", "unterlagen", "dokumentation",
      "exklusiv",   "einmalig",   "gelegenheit", "traumhaft", "idyllisch",    "urban",      "laendlich"};
  return words;
}

const std::vector<std::string> kAdjectives = {"Helle",    "Moderne",  "Ruhige",     "Sonnige", "Grosszuegige",
                                              "Renovierte", "Charmante", "Exklusive", "Neue",    "Gepflegte"};
const std::vector<std::string> kPortals = {"homegate", "immoscout24", "newhome", "comparis", "anibis",
                                           "tutti",    "immostreet",  "acheter-louer", "properti", "flatfox"};
const std::vector<std::string> kCantons = {"ZH", "BE", "VD", "GE", "AG", "SG", "TI", "VS", "LU", "ZG",
                                           "FR", "SO", "BL", "GR", "TG", "NE", "SZ", "JU", "SH", "AR"};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
bool chance(std::mt19937_64& rng, double p) { return p > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }
std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::string town_name(std::size_t i) {
  static const char* first[] = {"Ober", "Unter", "Nieder", "Alt", "Neu", "Wald", "See", "Berg", "Hoch", "Klein"};
  static const char* second[] = {"dorf", "wil", "ikon", "au", "berg", "bach", "hausen", "stetten", "wangen", "ingen"};
  return std::string(first[i % 10]) + second[(i / 10) % 10];
}

std::string padded(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

std::string format_rooms(double rooms) {
  char buf[16];
  std::snprintf(buf, sizeof buf, rooms == std::floor(rooms) ? "%.0f" : "%.1f", rooms);
  return buf;
}

std::string make_title(std::mt19937_64& rng, PropertyType type, double rooms, const std::string& town) {
  return kAdjectives[pick(rng, kAdjectives.size())] + " " + format_rooms(rooms) + "-Zimmer-" +
         (type == PropertyType::House ? "Haus" : "Wohnung") + " in " + town;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t n) {
  const auto& v = vocabulary();
  std::vector<std::string> out(n);
  for (auto& w : out) w = v[pick(rng, v.size())];
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string typo(std::mt19937_64& rng, std::string w) {
  if (w.size() < 2) return w + "e";
  const std::size_t i = pick(rng, w.size() - 1);
  if (chance(rng, 0.5)) {
    std::swap(w[i], w[i + 1]);
  } else {
    w.erase(i, 1);
  }
  return w;
}

std::string random_description(std::mt19937_64& rng) {
  return join(random_tokens(rng, 25 + pick(rng, 26)));
}

// Duplicate of `base` with text/space noise at strength s; price, zip,
// quarter and type are preserved.
Listing perturb(std::mt19937_64& rng, const Listing& base, double s) {
  Listing d = base;
  d.source_portal = kPortals[pick(rng, kPortals.size())];
  if (s <= 0.0) return d;

  auto title_words = split(d.title);
  for (auto& w : title_words)
    if (chance(rng, s)) w = typo(rng, w);
  d.title = join(title_words);

  const auto& vocab = vocabulary();
  std::vector<std::string> desc;
  for (auto& w : split(d.description)) {
    if (!chance(rng, s)) {
      desc.push_back(w);
      continue;
    }
    switch (pick(rng, 3)) {
      case 0: break;  // drop
      case 1: desc.push_back(vocab[pick(rng, vocab.size())]); break;
      default: desc.push_back(typo(rng, w)); break;
    }
  }
  d.description = join(desc);

  if (chance(rng, s)) d.living_space_m2 = std::max(10.0, std::round(d.living_space_m2 * uniform(rng, 0.95, 1.05) * 2.0) / 2.0);
  if (chance(rng, s / 4.0)) d.rooms = chance(rng, 0.5) || d.rooms < 1.5 ? d.rooms + 0.5 : d.rooms - 0.5;
  return d;
}

struct Geography {
  std::vector<std::string> zips;
  std::vector<std::string> zip_district;
  std::vector<std::string> zip_canton;
  std::vector<std::string> zip_town;
};

Geography make_geography(std::size_t districts, std::size_t zips_per_district, std::size_t districts_per_canton) {
  Geography g;
  for (std::size_t d = 0; d < districts; ++d) {
    for (std::size_t z = 0; z < zips_per_district; ++z) {
      const std::size_t k = d * zips_per_district + z;
      g.zips.push_back(std::to_string(1000 + 10 * k));
      g.zip_district.push_back(padded('D', d + 1, 3));
      g.zip_canton.push_back(kCantons[(d / std::max<std::size_t>(districts_per_canton, 1)) % kCantons.size()]);
      g.zip_town.push_back(town_name(k));
    }
  }
  return g;
}

// Shuffles, assigns ids, records truth and labeled block pairs.
void finalize(std::mt19937_64& rng, std::vector<Listing>& listings, std::vector<std::size_t>& cluster_of,
              std::size_t max_labeled, Corpus& out) {
  std::vector<std::size_t> order(listings.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  out.listings.clear();
  out.listings.reserve(listings.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Listing l = listings[order[k]];
    l.id = padded('L', k + 1, 7);
    out.truth[l.id] = padded('C', cluster_of[order[k]] + 1, 7);
    out.listings.push_back(std::move(l));
  }

  std::vector<dedup::LabeledPair> pairs;
  for (const auto& p : dedup::block_pairs(out.listings)) {
    const auto& a = out.listings[p.a];
    const auto& b = out.listings[p.b];
    pairs.push_back({a.id, b.id, out.truth.at(a.id) == out.truth.at(b.id)});
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  if (pairs.size() > max_labeled) pairs.resize(max_labeled);
  out.labeled = std::move(pairs);
}

}  // namespace

Eigen::VectorXd grid_times(const SynthSpec& spec) {
  Eigen::VectorXd t(spec.n_quarters);
  const long base = spec.first_quarter.ordinal();
  for (int k = 0; k < spec.n_quarters; ++k) t(k) = Quarter::from_ordinal(base + k).time();
  return t;
}

SeriesSample gen_lppl_series(const SynthSpec& spec) {
  if (spec.n_quarters < 1) throw PreconditionError("n_quarters must be positive");
  const Eigen::VectorXd t = grid_times(spec);
  if (!spec.post_critical && !(t.maxCoeff() < spec.params.tc))
    throw PreconditionError("critical time falls inside the grid; enable post_critical to allow it");

  Eigen::VectorXd y(t.size());
  for (Eigen::Index k = 0; k < t.size(); ++k)
    y(k) = spec.post_critical ? lppl::lppl_eval_extended(spec.params, t(k)) : lppl::lppl_eval(spec.params, t(k));

  SeriesSample out;
  out.truth = spec.params;
  out.noise_std = spec.noise_sigma * (y.maxCoeff() - y.minCoeff());
  if (out.noise_std > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, out.noise_std);
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += noise(rng);
  }

  out.series.cell = {"synthetic", PropertyType::Apartment, index::SizeClass::All};
  const long base = spec.first_quarter.ordinal();
  for (int k = 0; k < spec.n_quarters; ++k)
    out.series.points.push_back({Quarter::from_ordinal(base + k), std::exp(y(k)), 0, false});
  return out;
}

lppl::Params draw_qualified_params(std::mt19937_64& rng, const Eigen::VectorXd& t, const ParamDraw& draw,
                                   const lppl::FitConfig& config) {
  const double t_last = t.maxCoeff();
  for (int attempt = 0; attempt < 10000; ++attempt) {
    lppl::Params p;
    p.tc = t_last + uniform(rng, draw.tc_offset_min, draw.tc_offset_max);
    p.m = uniform(rng, draw.m_min, draw.m_max);
    p.omega = uniform(rng, draw.omega_min, draw.omega_max);
    p.a = draw.log_level;
    p.b = -uniform(rng, draw.b_min, draw.b_max);
    const double c = std::abs(p.b) * uniform(rng, draw.c_ratio_min, draw.c_ratio_max);
    const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    p.c1 = c * std::cos(phase);
    p.c2 = c * std::sin(phase);
    if (lppl::qualify(p, t, config) != lppl::kQualified) continue;
    if (lppl::oscillation_count(t, p.tc, p.omega) < config.min_oscillations + draw.oscillation_margin) continue;
    return p;
  }
  throw PreconditionError("could not draw qualified LPPL parameters with the given ranges");
}

Corpus gen_listing_corpus(const SynthSpec& spec) {
  if (spec.n_listings < 1) throw PreconditionError("n_listings must be at least 1");
  std::mt19937_64 rng(spec.seed);

  const auto n_dups = static_cast<std::size_t>(std::llround(std::clamp(spec.dup_rate, 0.0, 1.0) *
                                                            static_cast<double>(spec.n_listings)));
  const std::size_t n_base = std::max<std::size_t>(1, spec.n_listings - std::min(n_dups, spec.n_listings - 1));
  const std::size_t n_planted = spec.n_listings - n_base;
  const Geography geo = make_geography(20, 3, 4);
  const QuarterRange window{{2005, 1}, {2012, 4}};
  const long q0 = window.first.ordinal();
  const long nq = window.last.ordinal() - q0 + 1;

  std::vector<Listing> listings;
  std::vector<std::size_t> cluster_of;
  listings.reserve(spec.n_listings);

  for (std::size_t i = 0; i < n_base; ++i) {
    Listing l;
    l.source_portal = kPortals[pick(rng, kPortals.size())];
    if (i > 0 && chance(rng, 0.15)) {
      // sibling unit: same block, related text, different property
      const Listing& s = listings[pick(rng, listings.size())];
      l.zip = s.zip;
      l.district_id = s.district_id;
      l.canton = s.canton;
      l.listed_quarter = s.listed_quarter;
      l.property_type = s.property_type;
      l.price_chf = s.price_chf;
      l.rooms = chance(rng, 0.5) ? s.rooms : std::max(1.0, s.rooms + (chance(rng, 0.5) ? 0.5 : -0.5));
      l.living_space_m2 = std::round(l.rooms * uniform(rng, 20.0, 35.0) * 2.0) / 2.0;
      const std::size_t zi = static_cast<std::size_t>(std::find(geo.zips.begin(), geo.zips.end(), l.zip) - geo.zips.begin());
      l.title = chance(rng, 0.5) ? s.title : make_title(rng, l.property_type, l.rooms, geo.zip_town[zi]);
      auto shared = split(s.description);
      std::vector<std::string> desc;
      for (auto& w : shared)
        if (chance(rng, 0.5)) desc.push_back(w);
      auto fresh = random_tokens(rng, shared.size() - desc.size());
      desc.insert(desc.end(), fresh.begin(), fresh.end());
      std::shuffle(desc.begin(), desc.end(), rng);
      l.description = join(desc);
    } else {
      const std::size_t zi = pick(rng, geo.zips.size());
      l.zip = geo.zips[zi];
      l.district_id = geo.zip_district[zi];
      l.canton = geo.zip_canton[zi];
      l.listed_quarter = Quarter::from_ordinal(q0 + static_cast<long>(pick(rng, static_cast<std::size_t>(nq))));
      l.property_type = chance(rng, 0.5) ? PropertyType::House : PropertyType::Apartment;
      l.rooms = 1.0 + 0.5 * static_cast<double>(pick(rng, 15));
      l.living_space_m2 = std::round(l.rooms * uniform(rng, 20.0, 35.0) * 2.0) / 2.0;
      const double raw = l.property_type == PropertyType::House ? uniform(rng, 500e3, 2000e3)
                                                               : uniform(rng, 250e3, 1200e3);
      const double grid = l.property_type == PropertyType::House ? 25000.0 : 10000.0;
      l.price_chf = static_cast<std::int64_t>(std::round(raw / grid) * grid);
      l.title = make_title(rng, l.property_type, l.rooms, geo.zip_town[zi]);
      l.description = random_description(rng);
    }
    listings.push_back(std::move(l));
    cluster_of.push_back(i);
  }

  for (std::size_t k = 0; k < n_planted; ++k) {
    const std::size_t base = pick(rng, n_base);
    listings.push_back(perturb(rng, listings[base], spec.perturbation_strength));
    cluster_of.push_back(base);
  }

  Corpus out;
  out.planted_duplicates = n_planted;
  out.base_count = n_base;
  finalize(rng, listings, cluster_of, spec.max_labeled_pairs, out);
  return out;
}

Market gen_market_corpus(const MarketSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const Geography geo = make_geography(spec.districts, 2, spec.districts_per_canton);

  SynthSpec grid;
  grid.n_quarters = spec.n_quarters;
  grid.first_quarter = spec.first_quarter;
  const Eigen::VectorXd t = grid_times(grid);

  std::vector<std::size_t> order(spec.districts);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  Market market;
  market.planted.resize(spec.districts);
  lppl::FitConfig fit_defaults;
  for (std::size_t r = 0; r < spec.districts; ++r) {
    const std::size_t d = order[r];
    auto& pd = market.planted[d];
    pd.district_id = padded('D', d + 1, 3);
    if (r < spec.bubbles) {
      pd.trend = Trend::Bubble;
      ParamDraw draw;
      draw.tc_offset_min = draw.tc_offset_max = spec.bubble_tc_offset;
      draw.b_min = 0.3;
      draw.b_max = 0.45;
      draw.log_level = std::log(uniform(rng, 5000.0, 8000.0));
      pd.params = draw_qualified_params(rng, t, draw, fit_defaults);
    } else {
      pd.trend = Trend::Linear;
      pd.base = uniform(rng, 3000.0, 6000.0);
      pd.slope = uniform(rng, 80.0, 200.0);
    }
  }

  std::vector<Listing> listings;
  std::vector<std::size_t> cluster_of;
  for (std::size_t d = 0; d < spec.districts; ++d) {
    const auto& pd = market.planted[d];
    for (int k = 0; k < spec.n_quarters; ++k) {
      const double level = pd.trend == Trend::Bubble ? lppl::lppl_eval(pd.params, t(k))
                                                     : std::log(pd.base + pd.slope * k);
      for (std::size_t j = 0; j < spec.listings_per_quarter; ++j) {
        const std::size_t zi = d * 2 + pick(rng, 2);
        Listing l;
        l.source_portal = kPortals[pick(rng, kPortals.size())];
        l.zip = geo.zips[zi];
        l.district_id = geo.zip_district[zi];
        l.canton = geo.zip_canton[zi];
        l.listed_quarter = Quarter::from_ordinal(spec.first_quarter.ordinal() + k);
        l.property_type = PropertyType::Apartment;
        l.rooms = 4.0 + 0.5 * static_cast<double>(pick(rng, 4));
        l.living_space_m2 = std::round(uniform(rng, 80.0, 140.0) * 2.0) / 2.0;
        std::normal_distribution<double> spread(0.0, spec.price_dispersion);
        const double ppm2 = std::exp(level + spread(rng));
        l.price_chf = static_cast<std::int64_t>(std::llround(ppm2 * l.living_space_m2));
        l.title = make_title(rng, l.property_type, l.rooms, geo.zip_town[zi]);
        l.description = random_description(rng);
        cluster_of.push_back(listings.size());
        listings.push_back(std::move(l));
      }
    }
  }
  const std::size_t n_base = listings.size();
  const auto n_dups = static_cast<std::size_t>(std::llround(spec.dup_rate * static_cast<double>(n_base)));
  for (std::size_t k = 0; k < n_dups; ++k) {
    const std::size_t base = pick(rng, n_base);
    listings.push_back(perturb(rng, listings[base], spec.perturbation_strength));
    cluster_of.push_back(base);
  }

  market.corpus.planted_duplicates = n_dups;
  market.corpus.base_count = n_base;
  finalize(rng, listings, cluster_of, 20000, market.corpus);
  return market;
}

}  // namespace bubble::synth
