#pragma once

// Per-publication ordering metrics.
//
// For a byline of n >= 2 authors:
//   m      - count of consecutive pairs in alphabetical order (non-strict)
//   a      - whether the whole byline is alphabetical (m == n-1)
//   s      - alphabetization score 2*m/(n-1) - 1, in [-1, 1]
//   1/n!   - probability a random ordering is incidentally alphabetical
//   p-hat  - per-publication estimate of intentional alphabetical ordering,
//            (a - 1/n!) / (1 - 1/n!)
//
// For n = 2 the intent estimate and the score coincide bit-for-bit.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "byline/names.hpp"

namespace byline {

enum class DocType { article, note, review, other };

inline std::string_view to_string(DocType t) {
  switch (t) {
    case DocType::article: return "article";
    case DocType::note: return "note";
    case DocType::review: return "review";
    case DocType::other: return "other";
  }
  return "other";
}

inline DocType parse_doc_type(std::string_view text) {
  const std::string up = detail::ascii_upper(detail::trim(text));
  if (up == "ARTICLE") return DocType::article;
  if (up == "NOTE") return DocType::note;
  if (up == "REVIEW") return DocType::review;
  return DocType::other;
}

// Document types the analysis keeps by default.
inline bool is_analyzed_doc_type(DocType t) { return t != DocType::other; }

struct CategoryWeight {
  std::string label;
  double weight = 1.0;  // in (0, 1]; weights of one publication sum to 1
};

struct Publication {
  std::string id;
  int year = 0;
  DocType doc_type = DocType::article;
  std::vector<CanonicalName> authors;       // byline order as published
  std::vector<CategoryWeight> categories;   // may be empty
};

// Thrown for undefined metrics (fewer than two authors) and out-of-domain
// arguments.
class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct OrderingMetrics {
  int authors = 0;            // n
  bool alphabetical = false;  // a
  int adjacent_pairs = 0;     // m, in [0, n-1]
  int tie_pairs = 0;          // adjacent pairs of identical canonical names
  double score = 0.0;         // s, in [-1, 1]
  double intent_estimate = 0.0;
};

/// 1/n!, evaluated as a running product of reciprocals so the factorial is
/// never materialized; underflows cleanly to 0 for large n.
inline double incidental_probability(int authors) {
  if (authors < 1) throw MetricError("incidental probability requires at least one author");
  double q = 1.0;
  for (int k = 2; k <= authors; ++k) q /= k;
  return q;
}

/// (a - 1/n!) / (1 - 1/n!). Exactly 1 for alphabetical bylines; negative
/// otherwise (-1/(n!-1), which vanishes rapidly as n grows). Values are never
/// clamped: systematically negative group means are a model diagnostic.
inline double intent_estimate(bool alphabetical, int authors) {
  if (authors < 2) throw MetricError("intent estimate undefined for single-author publications");
  const double incidental = incidental_probability(authors);
  const double observed = alphabetical ? 1.0 : 0.0;
  return (observed - incidental) / (1.0 - incidental);
}

/// All per-publication metrics in one pass over the byline. Adjacent pairs
/// compare non-strictly: two identical canonical names carry no ordering
/// evidence and are counted in tie_pairs for transparency.
inline OrderingMetrics compute_metrics(const Publication& pub) {
  const int n = static_cast<int>(pub.authors.size());
  if (n < 2) throw MetricError("ordering metrics undefined for publications with fewer than two authors");
  OrderingMetrics m;
  m.authors = n;
  for (int i = 0; i + 1 < n; ++i) {
    const auto order = compare(pub.authors[i], pub.authors[i + 1]);
    if (order != std::strong_ordering::greater) ++m.adjacent_pairs;
    if (order == std::strong_ordering::equal) ++m.tie_pairs;
  }
  m.alphabetical = m.adjacent_pairs == n - 1;
  m.score = 2.0 * m.adjacent_pairs / (n - 1) - 1.0;
  m.intent_estimate = intent_estimate(m.alphabetical, n);
  return m;
}

inline bool is_alphabetical(const Publication& pub) { return compute_metrics(pub).alphabetical; }

inline int adjacent_alpha_pairs(const Publication& pub) { return compute_metrics(pub).adjacent_pairs; }

inline double alphabetization_score(const Publication& pub) { return compute_metrics(pub).score; }

inline bool has_non_latin_author(const Publication& pub) {
  for (const CanonicalName& a : pub.authors)
    if (a.non_latin) return true;
  return false;
}

/// True when the same canonical name occurs more than once in the byline.
/// Metrics are still computed for such records; callers flag them.
inline bool has_duplicate_author(const Publication& pub) {
  const std::size_t n = pub.authors.size();
  if (n < 2) return false;
  if (n <= 16) {
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (pub.authors[i] == pub.authors[j]) return true;
    return false;
  }
  std::unordered_set<std::string> seen;
  seen.reserve(n);
  for (const CanonicalName& a : pub.authors)
    if (!seen.insert(a.key_last + "\x1f" + a.key_initials).second) return true;
  return false;
}

}  // namespace byline
