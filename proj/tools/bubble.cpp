#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

#include "bubble/bootstrap.hpp"
#include "bubble/config.hpp"
#include "bubble/csv.hpp"
#include "bubble/dedup.hpp"
#include "bubble/diagnose.hpp"
#include "bubble/error.hpp"
#include "bubble/index.hpp"
#include "bubble/ingest.hpp"
#include "bubble/pipeline.hpp"
#include "bubble/synth.hpp"

namespace fs = std::filesystem;
using namespace bubble;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
};

struct Classifier {
  std::string model;
  std::string train;
  std::string train_listings;
  std::string truth;
};

struct SynthArgs {
  std::string kind = "corpus";
  std::size_t count = 1;
  double noise = 0.0;
  std::size_t listings = 10000;
  double dup_rate = 0.3;
  double perturbation = 0.2;
  std::size_t districts = 20;
  std::size_t bubbles = 3;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value configuration file");
  cmd->add_option("--seed", c.seed, "run seed");
  cmd->add_option("--out", c.out_dir, "stage directory")->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void add_classifier(CLI::App* cmd, Classifier& c) {
  cmd->add_option("--model", c.model, "trained pair classifier (model.json)");
  cmd->add_option("--train", c.train, "labeled pairs csv (id_a,id_b,label)");
  cmd->add_option("--train-listings", c.train_listings, "listings the labeled pairs refer to");
  cmd->add_option("--truth", c.truth, "ground truth csv (listing_id,true_cluster_id)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config_file(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.jobs) cfg.jobs = *c.jobs;
  cfg.svm.seed = cfg.seed;
  return cfg;
}

fs::path stage_file(const Common& c, const std::string& name) { return fs::path(c.out_dir) / name; }

std::ifstream open_input(const fs::path& path, const std::string& producer = {}) {
  if (!fs::exists(path)) {
    if (producer.empty()) throw IoError("cannot open " + path.string());
    throw IoError("missing " + path.string() + "; run `bubble " + producer + "` first");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Listing> read_listing_file(const fs::path& path, const RunConfig& cfg, const std::string& producer) {
  auto in = open_input(path, producer);
  auto r = ingest::parse_listings(in, cfg.window);
  if (!r.rejects.empty())
    throw PreconditionError(path.string() + ": " + std::to_string(r.rejects.size()) + " rows fail admission");
  return std::move(r.listings);
}

std::vector<dedup::LabeledPair> read_labeled_pairs(const fs::path& path) {
  auto in = open_input(path);
  csv::Reader reader(in);
  csv::Record rec;
  if (!reader.next(rec) || rec.fields != std::vector<std::string>{"id_a", "id_b", "label"})
    throw IoError(path.string() + ": expected header id_a,id_b,label");
  std::vector<dedup::LabeledPair> out;
  while (reader.next(rec)) {
    if (rec.fields.size() != 3 || (rec.fields[2] != "0" && rec.fields[2] != "1"))
      throw IoError(path.string() + ":" + std::to_string(rec.line_no) + ": malformed labeled pair");
    out.push_back({rec.fields[0], rec.fields[1], rec.fields[2] == "1"});
  }
  return out;
}

std::unordered_map<std::string, std::string> read_truth(const fs::path& path) {
  auto in = open_input(path);
  csv::Reader reader(in);
  csv::Record rec;
  if (!reader.next(rec) || rec.fields != std::vector<std::string>{"listing_id", "true_cluster_id"})
    throw IoError(path.string() + ": expected header listing_id,true_cluster_id");
  std::unordered_map<std::string, std::string> out;
  while (reader.next(rec)) {
    if (rec.fields.size() != 2) throw IoError(path.string() + ":" + std::to_string(rec.line_no) + ": malformed row");
    out[rec.fields[0]] = rec.fields[1];
  }
  return out;
}

// stages

int cmd_ingest(const Common& c, const std::string& input) {
  const RunConfig cfg = resolve(c);
  auto in = open_input(input);
  const auto result = ingest::parse_listings(in, cfg.window);

  const auto lp = stage_file(c, "listings.csv");
  auto lo = open_output(lp);
  pipeline::write_config_header(lo, "ingest", cfg);
  ingest::write_listings(lo, result.listings);
  finish(lo, lp);

  const auto rp = stage_file(c, "rejects.csv");
  auto ro = open_output(rp);
  pipeline::write_config_header(ro, "ingest", cfg);
  ingest::write_rejects(ro, result.rejects);
  finish(ro, rp);

  std::cout << "ingest: " << result.row_count() << " rows, " << result.listings.size() << " admitted, "
            << result.rejects.size() << " rejected\n";
  return 0;
}

LinearSvm obtain_classifier(const Common& c, const Classifier& k, const RunConfig& cfg,
                            const std::vector<Listing>& listings) {
  if (!k.model.empty()) return LinearSvm::from_json(read_text(k.model));
  if (k.train.empty()) throw UsageError("dedup needs --model or --train");
  const auto labeled = read_labeled_pairs(k.train);
  const auto train_listings =
      k.train_listings.empty() ? listings : read_listing_file(k.train_listings, cfg, "synth");
  const auto [x, y] = dedup::training_matrix(train_listings, labeled);
  const auto svm = LinearSvm::train(x, y, cfg.svm);

  const auto mp = stage_file(c, "model.json");
  auto mo = open_output(mp);
  mo << svm.to_json() << '\n';
  finish(mo, mp);
  return svm;
}

int cmd_dedup(const Common& c, const Classifier& k) {
  const RunConfig cfg = resolve(c);
  const auto listings = read_listing_file(stage_file(c, "listings.csv"), cfg, "ingest");
  const auto svm = obtain_classifier(c, k, cfg, listings);

  const auto judged = dedup::judge_pairs(listings, svm, cfg.jobs);
  const auto clusters = dedup::cluster_duplicates(judged, listings);

  const auto cp = stage_file(c, "clusters.csv");
  auto co = open_output(cp);
  pipeline::write_config_header(co, "dedup", cfg);
  csv::write_row(co, {"listing_id", "representative"});
  for (const auto& cl : clusters)
    for (const auto& id : cl.members) csv::write_row(co, {id, cl.representative});
  finish(co, cp);

  const auto dp = stage_file(c, "deduped.csv");
  auto dout = open_output(dp);
  pipeline::write_config_header(dout, "dedup", cfg);
  ingest::write_listings(dout, dedup::representatives(clusters, listings));
  finish(dout, dp);

  nlohmann::ordered_json summary;
  summary["config"] = pipeline::config_json(cfg);
  summary["input_listings"] = listings.size();
  summary["duplicate_pairs"] = judged.size();
  summary["clusters"] = clusters.size();
  std::cout << "dedup: " << listings.size() << " listings, " << clusters.size() << " clusters\n";
  if (!k.truth.empty()) {
    const auto s = dedup::pairwise_scores(clusters, read_truth(k.truth));
    summary["precision"] = s.precision;
    summary["recall"] = s.recall;
    summary["f1"] = s.f1;
    std::cout << "dedup: pairwise precision " << s.precision << " recall " << s.recall << " F1 " << s.f1 << '\n';
  }
  const auto sp = stage_file(c, "dedup_summary.json");
  auto so = open_output(sp);
  so << summary.dump(2) << '\n';
  finish(so, sp);
  return 0;
}

int cmd_index(const Common& c) {
  const RunConfig cfg = resolve(c);
  const auto listings = read_listing_file(stage_file(c, "deduped.csv"), cfg, "dedup");
  const auto series = index::build_all_series(listings, cfg.index);

  const auto sp = stage_file(c, "series.csv");
  auto so = open_output(sp);
  pipeline::write_config_header(so, "index", cfg);
  index::write_series(so, series);
  finish(so, sp);

  const auto heat = index::build_heatmap(series, cfg.heatmap);
  const auto hp = stage_file(c, "heatmap.csv");
  auto ho = open_output(hp);
  pipeline::write_config_header(ho, "index", cfg);
  index::write_heatmap(ho, heat);
  finish(ho, hp);

  std::cout << "index: " << series.size() << " series, " << heat.size() << " heatmap rows\n";
  return 0;
}

int cmd_fit(const Common& c) {
  const RunConfig cfg = resolve(c);
  auto in = open_input(stage_file(c, "series.csv"), "index");
  const auto series = index::read_series(in);
  const auto records = pipeline::fit_all(series, cfg);

  const auto fp = stage_file(c, "fits.csv");
  auto fo = open_output(fp);
  pipeline::write_config_header(fo, "fit", cfg);
  pipeline::write_fit_report(fo, records);
  finish(fo, fp);

  const auto pp = stage_file(c, "plot_series.csv");
  auto po = open_output(pp);
  pipeline::write_config_header(po, "fit", cfg);
  pipeline::write_plot_series(po, records);
  finish(po, pp);

  const auto sp = stage_file(c, "plot_scenarios.csv");
  auto so = open_output(sp);
  pipeline::write_config_header(so, "fit", cfg);
  pipeline::write_plot_scenarios(so, records, cfg.scenario_horizon_quarters);
  finish(so, sp);

  std::size_t qualified = 0, skipped = 0;
  for (const auto& r : records) {
    qualified += r.skipped.empty() && r.fit.qualified();
    skipped += !r.skipped.empty();
  }
  std::cout << "fit: " << records.size() << " series, " << qualified << " qualified, " << skipped << " skipped\n";
  return 0;
}

int cmd_diagnose(const Common& c) {
  const RunConfig cfg = resolve(c);
  auto in = open_input(stage_file(c, "fits.csv"), "fit");
  const auto rows = pipeline::read_fit_report(in);
  const auto diagnoses = pipeline::diagnose_all(rows, cfg);
  const auto report = diagnose::aggregate_report(diagnoses);

  const auto dp = stage_file(c, "diagnosis.csv");
  auto dout = open_output(dp);
  pipeline::write_config_header(dout, "diagnose", cfg);
  diagnose::write_diagnoses(dout, diagnoses);
  finish(dout, dp);

  const auto jp = stage_file(c, "diagnosis.json");
  auto jo = open_output(jp);
  jo << pipeline::report_json(report, cfg).dump(2) << '\n';
  finish(jo, jp);

  std::cout << "diagnose: " << report.critical << " critical, " << report.burst << " burst, " << report.none
            << " none\n";
  for (const auto* d : report.with(diagnose::Verdict::Critical)) std::cout << "  critical " << d->district_id << '\n';
  for (const auto* d : report.with(diagnose::Verdict::Burst)) std::cout << "  watch " << d->district_id << '\n';
  return 0;
}

void write_corpus_files(const Common& c, const RunConfig& cfg, const synth::Corpus& corpus) {
  const auto lp = stage_file(c, "listings_raw.csv");
  auto lo = open_output(lp);
  ingest::write_listings(lo, corpus.listings);
  finish(lo, lp);

  const auto tp = stage_file(c, "truth.csv");
  auto to = open_output(tp);
  pipeline::write_config_header(to, "synth", cfg);
  csv::write_row(to, {"listing_id", "true_cluster_id"});
  for (const auto& l : corpus.listings) csv::write_row(to, {l.id, corpus.truth.at(l.id)});
  finish(to, tp);

  const auto pp = stage_file(c, "training_pairs.csv");
  auto po = open_output(pp);
  pipeline::write_config_header(po, "synth", cfg);
  csv::write_row(po, {"id_a", "id_b", "label"});
  for (const auto& p : corpus.labeled) csv::write_row(po, {p.id_a, p.id_b, p.duplicate ? "1" : "0"});
  finish(po, pp);
}

std::vector<std::string> param_fields(const lppl::Params& p) {
  using csv::format_double;
  return {format_double(p.tc), format_double(p.m),  format_double(p.omega), format_double(p.a),
          format_double(p.b),  format_double(p.c1), format_double(p.c2)};
}

int cmd_synth(const Common& c, const SynthArgs& a) {
  const RunConfig cfg = resolve(c);
  if (a.kind == "series") {
    std::mt19937_64 rng(cfg.seed);
    synth::SynthSpec spec;
    const auto t = synth::grid_times(spec);
    std::vector<index::IndexSeries> series;
    std::vector<std::vector<std::string>> truth_rows;
    for (std::size_t i = 0; i < a.count; ++i) {
      spec.seed = lppl::mix_seed(cfg.seed, i);
      spec.params = synth::draw_qualified_params(rng, t, {}, cfg.fit);
      spec.noise_sigma = a.noise;
      auto sample = synth::gen_lppl_series(spec);
      std::ostringstream id;
      id << 'S' << std::setw(3) << std::setfill('0') << i + 1;
      sample.series.cell = {id.str(), PropertyType::Apartment, index::SizeClass::Medium};
      auto row = param_fields(sample.truth);
      row.insert(row.begin(), id.str());
      row.push_back(csv::format_double(sample.noise_std));
      truth_rows.push_back(std::move(row));
      series.push_back(std::move(sample.series));
    }
    const auto sp = stage_file(c, "series.csv");
    auto so = open_output(sp);
    pipeline::write_config_header(so, "synth", cfg);
    index::write_series(so, series);
    finish(so, sp);

    const auto tp = stage_file(c, "true_params.csv");
    auto to = open_output(tp);
    pipeline::write_config_header(to, "synth", cfg);
    csv::write_row(to, {"district_id", "tc", "m", "omega", "A", "B", "C1", "C2", "noise_std"});
    for (const auto& r : truth_rows) csv::write_row(to, r);
    finish(to, tp);
    std::cout << "synth: " << series.size() << " series\n";
    return 0;
  }
  if (a.kind == "corpus") {
    synth::SynthSpec spec;
    spec.seed = cfg.seed;
    spec.n_listings = a.listings;
    spec.dup_rate = a.dup_rate;
    spec.perturbation_strength = a.perturbation;
    const auto corpus = synth::gen_listing_corpus(spec);
    write_corpus_files(c, cfg, corpus);
    std::cout << "synth: " << corpus.listings.size() << " listings, " << corpus.planted_duplicates
              << " planted duplicates\n";
    return 0;
  }
  if (a.kind == "market") {
    synth::MarketSpec spec;
    spec.seed = cfg.seed;
    spec.districts = a.districts;
    spec.bubbles = a.bubbles;
    spec.dup_rate = a.dup_rate;
    spec.perturbation_strength = a.perturbation;
    spec.first_quarter = cfg.window.first;
    const auto market = synth::gen_market_corpus(spec);
    write_corpus_files(c, cfg, market.corpus);

    const auto pp = stage_file(c, "planted.csv");
    auto po = open_output(pp);
    pipeline::write_config_header(po, "synth", cfg);
    csv::write_row(po, {"district_id", "trend", "tc", "m", "omega", "A", "B", "C1", "C2", "base", "slope"});
    for (const auto& d : market.planted) {
      std::vector<std::string> row{d.district_id, d.trend == synth::Trend::Bubble ? "bubble" : "linear"};
      if (d.trend == synth::Trend::Bubble) {
        const auto f = param_fields(d.params);
        row.insert(row.end(), f.begin(), f.end());
        row.insert(row.end(), {"", ""});
      } else {
        row.insert(row.end(), 7, "");
        row.push_back(csv::format_double(d.base));
        row.push_back(csv::format_double(d.slope));
      }
      csv::write_row(po, row);
    }
    finish(po, pp);
    std::cout << "synth: " << market.corpus.listings.size() << " listings in " << market.planted.size()
              << " districts\n";
    return 0;
  }
  throw UsageError("unknown synth kind " + a.kind);
}

int cmd_report(const Common& c, const std::string& input, const Classifier& k) {
  cmd_ingest(c, input);
  cmd_dedup(c, k);
  cmd_index(c);
  cmd_fit(c);
  return cmd_diagnose(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-estate bubble diagnostics from listing data"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  Classifier classifier;
  SynthArgs synth_args;
  std::string input;

  auto* ingest_cmd = app.add_subcommand("ingest", "parse and filter raw listings");
  add_common(ingest_cmd, common);
  ingest_cmd->add_option("input", input, "raw listings csv")->required();

  auto* dedup_cmd = app.add_subcommand("dedup", "cluster duplicate listings");
  add_common(dedup_cmd, common);
  add_classifier(dedup_cmd, classifier);

  auto* index_cmd = app.add_subcommand("index", "build quarterly median price series");
  add_common(index_cmd, common);

  auto* fit_cmd = app.add_subcommand("fit", "calibrate LPPL fits and bootstrap tc intervals");
  add_common(fit_cmd, common);

  auto* diagnose_cmd = app.add_subcommand("diagnose", "district verdicts and report");
  add_common(diagnose_cmd, common);

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic data with ground truth");
  add_common(synth_cmd, common);
  synth_cmd->add_option("--kind", synth_args.kind, "series | corpus | market")
      ->check(CLI::IsMember({"series", "corpus", "market"}))
      ->capture_default_str();
  synth_cmd->add_option("--count", synth_args.count, "series to generate")->capture_default_str();
  synth_cmd->add_option("--noise", synth_args.noise, "noise as a fraction of the log-price range")
      ->capture_default_str();
  synth_cmd->add_option("--listings", synth_args.listings, "corpus size")->capture_default_str();
  synth_cmd->add_option("--dup-rate", synth_args.dup_rate, "planted duplicate rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth_cmd->add_option("--perturbation", synth_args.perturbation, "duplicate perturbation strength")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth_cmd->add_option("--districts", synth_args.districts, "market districts")->capture_default_str();
  synth_cmd->add_option("--bubbles", synth_args.bubbles, "market districts with a planted bubble")
      ->capture_default_str();

  auto* report_cmd = app.add_subcommand("report", "run every stage from raw listings");
  add_common(report_cmd, common);
  add_classifier(report_cmd, classifier);
  report_cmd->add_option("input", input, "raw listings csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(common, input);
    if (*dedup_cmd) return cmd_dedup(common, classifier);
    if (*index_cmd) return cmd_index(common);
    if (*fit_cmd) return cmd_fit(common);
    if (*diagnose_cmd) return cmd_diagnose(common);
    if (*synth_cmd) return cmd_synth(common, synth_args);
    if (*report_cmd) return cmd_report(common, input, classifier);
  } catch (const UsageError& e) {
    std::cerr << "bubble: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "bubble: " << e.what() << '\n';
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "bubble: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "bubble: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "bubble: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
