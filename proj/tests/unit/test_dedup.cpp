#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bubble/dedup.hpp"
#include "bubble/disjoint_set.hpp"
#include "bubble/error.hpp"
#include "bubble/svm.hpp"
#include "bubble/synth.hpp"

using namespace bubble;

namespace {

Listing make(const std::string& id, const std::string& title, const std::string& desc, double space,
             std::int64_t price = 900000, double rooms = 4.5) {
  Listing l;
  l.id = id;
  l.source_portal = "p";
  l.zip = "8001";
  l.district_id = "D1";
  l.canton = "ZH";
  l.property_type = PropertyType::Apartment;
  l.rooms = rooms;
  l.price_chf = price;
  l.living_space_m2 = space;
  l.title = title;
  l.description = desc;
  l.listed_quarter = {2010, 1};
  return l;
}

}  // namespace

TEST_CASE("blocking keeps pairs inside a block") {
  std::vector<Listing> ls{make("a", "x", "y", 80), make("b", "x", "y", 80), make("c", "x", "y", 80, 1),
                          make("d", "x", "y", 80)};
  ls[3].listed_quarter = {2010, 2};
  const auto pairs = dedup::block_pairs(ls);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == dedup::CandidatePair{1, 0});
}

TEST_CASE("pair features") {
  const auto a = make("a", "Sonnige Wohnung", "helle wohnung mit balkon", 100);
  const auto b = make("b", "Sonnige Wohnung", "helle wohnung mit balkon", 110);
  text::DocumentFrequency df;
  df.add_document(a.description);
  df.add_document(b.description);
  const auto f = dedup::extract_features(a, b, df);
  CHECK(f.title_jaro_winkler == 1.0);
  CHECK(f.title_edit_sim == 1.0);
  CHECK(f.desc_tfidf_cosine == doctest::Approx(1.0));
  CHECK(f.rooms_equal == 1.0);
  CHECK(f.space_rel_diff == doctest::Approx(10.0 / 110.0));
  CHECK_FALSE(dedup::exact_copy(a, b));
  CHECK(dedup::exact_copy(a, make("z", a.title, a.description, 100)));

  const auto c = make("c", "Altbau", "grosser garten", 100, 900000, 5.5);
  const auto g = dedup::extract_features(a, c, df);
  CHECK(g.rooms_equal == 0.0);
  CHECK(g.desc_tfidf_cosine == 0.0);
}

TEST_CASE("svm separates a linearly separable set") {
  // label = sign(x0 + x1 - 1) with a margin of 0.2 around the boundary
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  Eigen::MatrixXd x(200, 2);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < 200;) {
    const double a = u(rng), b = u(rng);
    const double s = a + b - 1.0;
    if (std::abs(s) < 0.2) continue;
    x(i, 0) = a;
    x(i, 1) = b;
    y.push_back(s > 0 ? 1 : -1);
    ++i;
  }
  const auto svm = LinearSvm::train(x, y, {1e-4, 200, 3});
  int correct = 0;
  for (Eigen::Index i = 0; i < 200; ++i) correct += svm.predict(x.row(i).transpose()) == (y[i] > 0);
  CHECK(correct == 200);

  const auto restored = LinearSvm::from_json(svm.to_json());
  CHECK(restored.bias() == svm.bias());
  CHECK(restored.weights() == svm.weights());

  const auto again = LinearSvm::train(x, y, {1e-4, 200, 3});
  CHECK(again.weights() == svm.weights());
}

TEST_CASE("svm rejects degenerate training input") {
  CHECK_THROWS_AS(LinearSvm::train(Eigen::MatrixXd(0, 5), {}, {}), PreconditionError);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  CHECK_THROWS_AS(LinearSvm::train(x, {1, 1, 1, 1}, {}), PreconditionError);
  CHECK_THROWS_AS(LinearSvm::train(x, {1, -1, 0, 1}, {}), PreconditionError);
}

TEST_CASE("disjoint set closure") {
  DisjointSet ds(6);
  ds.unite(0, 1);
  ds.unite(1, 2);
  ds.unite(4, 5);
  CHECK(ds.find(0) == ds.find(2));
  CHECK(ds.find(3) != ds.find(0));
  CHECK(ds.find(4) == ds.find(5));
}

TEST_CASE("clustering is transitive and representatives are smallest ids") {
  std::vector<Listing> ls;
  for (const char* id : {"e", "b", "d", "a", "c"}) ls.push_back(make(id, "t", "d", 50));
  // e-b, b-a -> {a,b,e}; d-c -> {c,d}
  const std::vector<dedup::CandidatePair> judged{{0, 1}, {1, 3}, {2, 4}};
  const auto clusters = dedup::cluster_duplicates(judged, ls);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].representative == "a");
  CHECK(clusters[0].members == std::vector<std::string>{"a", "b", "e"});
  CHECK(clusters[1].representative == "c");
  CHECK(clusters[1].members == std::vector<std::string>{"c", "d"});

  const auto reps = dedup::representatives(clusters, ls);
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].id == "a");
  CHECK(reps[1].id == "c");
}

TEST_CASE("pairwise scores") {
  std::unordered_map<std::string, std::string> truth{{"a", "1"}, {"b", "1"}, {"c", "1"}, {"d", "2"}};
  std::vector<dedup::DuplicateCluster> pred{{{"a", "b"}, "a"}, {{"c", "d"}, "c"}};
  const auto s = dedup::pairwise_scores(pred, truth);
  // predicted pairs ab, cd; true pairs ab, ac, bc
  CHECK(s.true_positive == 1);
  CHECK(s.predicted_pairs == 2);
  CHECK(s.true_pairs == 3);
  CHECK(s.f1 == doctest::Approx(2.0 * 0.5 * (1.0 / 3.0) / (0.5 + 1.0 / 3.0)));
}

TEST_CASE("exact copies always merge and the partition covers every listing") {
  synth::SynthSpec spec;
  spec.seed = 21;
  spec.n_listings = 600;
  spec.perturbation_strength = 0.0;
  const auto corpus = synth::gen_listing_corpus(spec);
  // a classifier that never fires leaves only the exact-copy rule
  const LinearSvm never(Eigen::VectorXd::Zero(dedup::kFeatureCount), -1.0);
  const auto judged = dedup::judge_pairs(corpus.listings, never, 1);
  const auto clusters = dedup::cluster_duplicates(judged, corpus.listings);
  const auto scores = dedup::pairwise_scores(clusters, corpus.truth);
  CHECK(scores.f1 == 1.0);

  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& c : clusters) {
    total += c.members.size();
    CHECK(c.representative == c.members.front());
    CHECK(std::is_sorted(c.members.begin(), c.members.end()));
    seen.insert(c.members.begin(), c.members.end());
  }
  CHECK(total == corpus.listings.size());
  CHECK(seen.size() == corpus.listings.size());

  // judging is independent of the worker count
  CHECK(dedup::judge_pairs(corpus.listings, never, 3) == judged);
}
