#include "bubble/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "bubble/disjoint_set.hpp"
#include "bubble/error.hpp"
#include "bubble/parallel.hpp"

namespace bubble::dedup {

BlockKey block_key(const Listing& l) { return {l.zip, l.listed_quarter, l.property_type, l.price_chf}; }

std::map<BlockKey, std::vector<std::size_t>> group_blocks(const std::vector<Listing>& listings) {
  std::map<BlockKey, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < listings.size(); ++i) blocks[block_key(listings[i])].push_back(i);
  return blocks;
}

std::vector<CandidatePair> block_pairs(const std::vector<Listing>& listings) {
  std::vector<CandidatePair> pairs;
  for (const auto& [key, members] : group_blocks(listings)) {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) pairs.emplace_back(members[i], members[j]);
  }
  return pairs;
}

namespace {

text::DocumentFrequency block_stats(const std::vector<Listing>& listings, const std::vector<std::size_t>& members) {
  text::DocumentFrequency df;
  for (auto i : members) df.add_document(listings[i].description);
  return df;
}

}  // namespace

PairFeatures extract_features(const Listing& a, const Listing& b, const text::DocumentFrequency& stats) {
  PairFeatures f;
  f.title_jaro_winkler = text::jaro_winkler(a.title, b.title);
  f.title_edit_sim = text::edit_similarity(a.title, b.title);
  f.desc_tfidf_cosine = text::tfidf_cosine(a.description, b.description, stats);
  f.rooms_equal = a.rooms == b.rooms ? 1.0 : 0.0;
  const double larger = std::max(a.living_space_m2, b.living_space_m2);
  f.space_rel_diff = larger > 0.0 ? std::abs(a.living_space_m2 - b.living_space_m2) / larger : 0.0;
  return f;
}

PairFeatures extract_features(const CandidatePair& p, const std::vector<Listing>& listings) {
  const auto key = block_key(listings.at(p.a));
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < listings.size(); ++i)
    if (block_key(listings[i]) == key) members.push_back(i);
  if (std::find(members.begin(), members.end(), p.b) == members.end()) members.push_back(p.b);
  return extract_features(listings[p.a], listings.at(p.b), block_stats(listings, members));
}

bool exact_copy(const Listing& a, const Listing& b) {
  return a.title == b.title && a.description == b.description && a.rooms == b.rooms &&
         a.living_space_m2 == b.living_space_m2;
}

std::pair<Eigen::MatrixXd, std::vector<int>> training_matrix(const std::vector<Listing>& listings,
                                                             const std::vector<LabeledPair>& labeled) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < listings.size(); ++i) by_id.emplace(listings[i].id, i);

  const auto blocks = group_blocks(listings);
  std::map<BlockKey, text::DocumentFrequency> stats_cache;

  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  for (const auto& lp : labeled) {
    auto ia = by_id.find(lp.id_a);
    auto ib = by_id.find(lp.id_b);
    if (ia == by_id.end() || ib == by_id.end() || ia->second == ib->second) continue;
    const Listing& a = listings[ia->second];
    const Listing& b = listings[ib->second];
    const auto key = block_key(a);
    PairFeatures f;
    if (key == block_key(b)) {
      auto it = stats_cache.find(key);
      if (it == stats_cache.end()) it = stats_cache.emplace(key, block_stats(listings, blocks.at(key))).first;
      f = extract_features(a, b, it->second);
    } else {
      text::DocumentFrequency df;
      df.add_document(a.description);
      df.add_document(b.description);
      f = extract_features(a, b, df);
    }
    rows.push_back(f.vector());
    labels.push_back(lp.duplicate ? 1 : -1);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return {std::move(x), std::move(labels)};
}

LinearSvm train_classifier(const std::vector<PairFeatures>& features, const std::vector<bool>& duplicate,
                           const SvmConfig& config) {
  if (features.size() != duplicate.size()) throw PreconditionError("feature/label count mismatch");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()), kFeatureCount);
  std::vector<int> y(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = features[i].vector().transpose();
    y[i] = duplicate[i] ? 1 : -1;
  }
  return LinearSvm::train(x, y, config);
}

std::vector<CandidatePair> judge_pairs(const std::vector<Listing>& listings, const LinearSvm& classifier,
                                       unsigned jobs) {
  const auto blocks = group_blocks(listings);
  std::vector<const std::vector<std::size_t>*> work;
  for (const auto& [key, members] : blocks)
    if (members.size() > 1) work.push_back(&members);

  std::vector<std::vector<CandidatePair>> per_block(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t w) {
    const auto& members = *work[w];
    const auto stats = block_stats(listings, members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const Listing& a = listings[members[i]];
        const Listing& b = listings[members[j]];
        if (exact_copy(a, b) || classifier.predict(extract_features(a, b, stats).vector()))
          per_block[w].emplace_back(members[i], members[j]);
      }
    }
  });

  std::vector<CandidatePair> out;
  for (auto& v : per_block) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<DuplicateCluster> cluster_duplicates(const std::vector<CandidatePair>& duplicate_pairs,
                                                 const std::vector<Listing>& listings) {
  DisjointSet sets(listings.size());
  for (const auto& p : duplicate_pairs) {
    if (p.a >= listings.size() || p.b >= listings.size()) throw PreconditionError("pair index out of range");
    sets.unite(p.a, p.b);
  }

  std::unordered_map<std::size_t, std::size_t> root_to_cluster;
  std::vector<DuplicateCluster> clusters;
  for (std::size_t i = 0; i < listings.size(); ++i) {
    auto [it, inserted] = root_to_cluster.emplace(sets.find(i), clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].members.push_back(listings[i].id);
  }
  for (auto& c : clusters) {
    std::sort(c.members.begin(), c.members.end());
    c.representative = c.members.front();
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const DuplicateCluster& x, const DuplicateCluster& y) { return x.representative < y.representative; });
  return clusters;
}

std::vector<Listing> representatives(const std::vector<DuplicateCluster>& clusters,
                                     const std::vector<Listing>& listings) {
  std::unordered_map<std::string, const Listing*> by_id;
  for (const auto& l : listings) by_id.emplace(l.id, &l);
  std::vector<Listing> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) {
    auto it = by_id.find(c.representative);
    if (it == by_id.end()) throw PreconditionError("representative " + c.representative + " not among listings");
    out.push_back(*it->second);
  }
  return out;
}

namespace {
std::uint64_t choose2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
}  // namespace

PairwiseScores pairwise_scores(const std::vector<DuplicateCluster>& predicted,
                               const std::unordered_map<std::string, std::string>& truth) {
  PairwiseScores s;
  std::map<std::string, std::uint64_t> true_sizes;
  for (const auto& c : predicted) {
    s.predicted_pairs += choose2(c.members.size());
    std::map<std::string, std::uint64_t> overlap;
    for (const auto& id : c.members) {
      auto it = truth.find(id);
      const std::string key = it == truth.end() ? "\x01" + id : it->second;
      ++overlap[key];
      ++true_sizes[key];
    }
    for (const auto& [k, n] : overlap) s.true_positive += choose2(n);
  }
  for (const auto& [k, n] : true_sizes) s.true_pairs += choose2(n);

  s.precision = s.predicted_pairs ? static_cast<double>(s.true_positive) / s.predicted_pairs : 1.0;
  s.recall = s.true_pairs ? static_cast<double>(s.true_positive) / s.true_pairs : 1.0;
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace bubble::dedup
