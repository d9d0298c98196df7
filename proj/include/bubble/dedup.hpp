#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "bubble/listing.hpp"
#include "bubble/string_metrics.hpp"
#include "bubble/svm.hpp"

namespace bubble::dedup {

/// Records can only be duplicates when they agree on every blocking key.
struct BlockKey {
  std::string zip;
  Quarter quarter;
  PropertyType property_type = PropertyType::Apartment;
  std::int64_t price_chf = 0;

  auto operator<=>(const BlockKey&) const = default;
};

BlockKey block_key(const Listing& l);

/// Unordered pair of listing indices, stored with a < b.
struct CandidatePair {
  std::size_t a = 0;
  std::size_t b = 0;

  CandidatePair() = default;
  CandidatePair(std::size_t x, std::size_t y) : a(std::min(x, y)), b(std::max(x, y)) {}
  auto operator<=>(const CandidatePair&) const = default;
};

/// Listing indices grouped by block, blocks in key order.
std::map<BlockKey, std::vector<std::size_t>> group_blocks(const std::vector<Listing>& listings);

/// All within-block pairs, in block order then index order.
std::vector<CandidatePair> block_pairs(const std::vector<Listing>& listings);

inline constexpr int kFeatureCount = 5;
using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

struct PairFeatures {
  double title_jaro_winkler = 0.0;
  double title_edit_sim = 0.0;
  double desc_tfidf_cosine = 0.0;
  double rooms_equal = 0.0;
  double space_rel_diff = 0.0;

  FeatureVector vector() const {
    FeatureVector v;
    v << title_jaro_winkler, title_edit_sim, desc_tfidf_cosine, rooms_equal, space_rel_diff;
    return v;
  }
};

PairFeatures extract_features(const Listing& a, const Listing& b, const text::DocumentFrequency& block_stats);

/// Convenience form: document frequencies are taken over the pair's block.
PairFeatures extract_features(const CandidatePair& p, const std::vector<Listing>& listings);

/// Title, description, rooms and living space all identical.
bool exact_copy(const Listing& a, const Listing& b);

struct LabeledPair {
  std::string id_a;
  std::string id_b;
  bool duplicate = false;
};

/// Builds the (features, +-1 label) training matrix for labeled id pairs.
/// Pairs naming unknown ids are skipped.
std::pair<Eigen::MatrixXd, std::vector<int>> training_matrix(const std::vector<Listing>& listings,
                                                             const std::vector<LabeledPair>& labeled);

LinearSvm train_classifier(const std::vector<PairFeatures>& features, const std::vector<bool>& duplicate,
                           const SvmConfig& config);

/// Candidate pairs the classifier (or the exact-copy rule) judges duplicate.
std::vector<CandidatePair> judge_pairs(const std::vector<Listing>& listings, const LinearSvm& classifier,
                                       unsigned jobs = 1);

struct DuplicateCluster {
  std::vector<std::string> members;  // sorted
  std::string representative;        // smallest id
};

/// Transitive closure of the judged pairs. Every listing appears in exactly
/// one cluster; clusters are ordered by representative id.
std::vector<DuplicateCluster> cluster_duplicates(const std::vector<CandidatePair>& duplicate_pairs,
                                                 const std::vector<Listing>& listings);

/// One listing per cluster (the representative), in cluster order.
std::vector<Listing> representatives(const std::vector<DuplicateCluster>& clusters,
                                     const std::vector<Listing>& listings);

struct PairwiseScores {
  std::uint64_t true_positive = 0;
  std::uint64_t predicted_pairs = 0;
  std::uint64_t true_pairs = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

/// Pairwise precision/recall/F1 of a clustering against a truth labelling
/// (listing id -> true cluster id). Ids missing from the truth are singletons.
PairwiseScores pairwise_scores(const std::vector<DuplicateCluster>& predicted,
                               const std::unordered_map<std::string, std::string>& truth);

}  // namespace bubble::dedup
