#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bubble::text {

/// Jaro-Winkler similarity with prefix scale 0.1 and prefix cap 4.
double jaro(std::string_view a, std::string_view b);
double jaro_winkler(std::string_view a, std::string_view b);

/// Levenshtein distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein / max length; 1 when both are empty.
double edit_similarity(std::string_view a, std::string_view b);

/// Lowercased tokens split on whitespace and ASCII punctuation.
std::vector<std::string> tokenize(std::string_view text);

/// Document-frequency table over a set of documents.
class DocumentFrequency {
 public:
  DocumentFrequency() = default;

  void add_document(std::string_view text);
  void add_tokens(const std::vector<std::string>& tokens);

  std::size_t documents() const { return n_docs_; }
  /// 0 for an out-of-vocabulary token.
  std::size_t frequency(const std::string& token) const;
  bool contains(const std::string& token) const { return df_.count(token) != 0; }
  /// Smoothed inverse document frequency ln((1 + N) / (1 + df)) + 1.
  double idf(const std::string& token) const;

 private:
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

/// Cosine of the TF-IDF vectors of two documents. Tokens absent from the
/// table are ignored; 0 when either side has no in-vocabulary token.
double tfidf_cosine(std::string_view a, std::string_view b, const DocumentFrequency& stats);

}  // namespace bubble::text
