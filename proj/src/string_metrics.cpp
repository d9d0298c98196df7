#include "bubble/string_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace bubble::text {

double jaro(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;

  const std::size_t window = std::max<std::size_t>(std::max(a.size(), b.size()) / 2, 1) - 1;
  std::vector<char> a_hit(a.size(), 0), b_hit(b.size(), 0);

  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(b.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (b_hit[j] || a[i] != b[j]) continue;
      a_hit[i] = b_hit[j] = 1;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!a_hit[i]) continue;
    while (!b_hit[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions / 2);
  return (m / a.size() + m / b.size() + (m - t) / m) / 3.0;
}

double jaro_winkler(std::string_view a, std::string_view b) {
  const double j = jaro(a, b);
  std::size_t prefix = 0;
  while (prefix < 4 && prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  return j + prefix * 0.1 * (1.0 - j);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) || (u < 128 && std::ispunct(u))) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

void DocumentFrequency::add_document(std::string_view text) { add_tokens(tokenize(text)); }

void DocumentFrequency::add_tokens(const std::vector<std::string>& tokens) {
  ++n_docs_;
  std::set<std::string> unique(tokens.begin(), tokens.end());
  for (const auto& t : unique) ++df_[t];
}

std::size_t DocumentFrequency::frequency(const std::string& token) const {
  auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

double DocumentFrequency::idf(const std::string& token) const {
  return std::log((1.0 + n_docs_) / (1.0 + frequency(token))) + 1.0;
}

namespace {

std::map<std::string, double> tfidf_vector(std::string_view doc, const DocumentFrequency& stats) {
  std::map<std::string, double> v;
  for (auto& t : tokenize(doc))
    if (stats.contains(t)) v[t] += 1.0;
  for (auto& [t, w] : v) w *= stats.idf(t);
  return v;
}

}  // namespace

double tfidf_cosine(std::string_view a, std::string_view b, const DocumentFrequency& stats) {
  const auto va = tfidf_vector(a, stats);
  const auto vb = tfidf_vector(b, stats);
  if (va.empty() || vb.empty()) return 0.0;

  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : va) {
    na += w * w;
    auto it = vb.find(t);
    if (it != vb.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : vb) nb += w * w;
  const double c = dot / std::sqrt(na * nb);
  return std::clamp(c, 0.0, 1.0);
}

}  // namespace bubble::text
