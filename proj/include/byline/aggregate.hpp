#pragma once

// Group statistics over streams of publication metrics.
//
// Accumulators are plain mergeable values: workers fold publications into
// private accumulators and the partials merge associatively at the end.
// Sums are Kahan-compensated so the result is stable (well inside 1e-12
// relative) regardless of how the corpus was partitioned across workers.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "byline/metrics.hpp"

namespace byline {

class AggregateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  void merge(const KahanSum& other) {
    add(other.sum);
    add(-other.carry);
  }
  double value() const { return sum - carry; }
};

// A single year or an inclusive pooled range such as 2007-2011.
struct YearSpan {
  int first = 0;
  int last = 0;

  static YearSpan single(int y) { return {y, y}; }
  bool pooled() const { return last != first; }
  bool contains(int y) const { return y >= first && y <= last; }
  auto operator<=>(const YearSpan&) const = default;

  std::string to_string() const {
    return pooled() ? std::to_string(first) + "-" + std::to_string(last) : std::to_string(first);
  }
  static std::optional<YearSpan> parse(std::string_view text);
};

inline std::optional<YearSpan> YearSpan::parse(std::string_view text) {
  const auto to_year = [](std::string_view s) -> std::optional<int> {
    if (s.empty() || s.size() > 6) return std::nullopt;
    int v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  const std::size_t dash = text.find('-');
  if (dash == std::string_view::npos) {
    if (auto y = to_year(text)) return YearSpan::single(*y);
    return std::nullopt;
  }
  const auto a = to_year(text.substr(0, dash));
  const auto b = to_year(text.substr(dash + 1));
  if (!a || !b || *b < *a) return std::nullopt;
  return YearSpan{*a, *b};
}

// Author-count bins: exact counts 2..50 plus a single over-50 bin for
// hyperauthorship publications.
inline constexpr int kMaxExactAuthorBin = 50;
inline constexpr int kOver50AuthorBin = kMaxExactAuthorBin + 1;

inline int author_bin(int authors) {
  return authors > kMaxExactAuthorBin ? kOver50AuthorBin : authors;
}

inline std::string author_bin_label(int bin) {
  return bin == kOver50AuthorBin ? "over-50" : std::to_string(bin);
}

inline std::optional<int> parse_author_bin(std::string_view text) {
  if (text == "over-50") return kOver50AuthorBin;
  int v = 0;
  if (text.empty() || text.size() > 2) return std::nullopt;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  if (v < 2 || v > kMaxExactAuthorBin) return std::nullopt;
  return v;
}

struct GroupKey {
  std::optional<std::string> category;
  std::optional<YearSpan> years;
  std::optional<int> author_bin;

  auto operator<=>(const GroupKey&) const = default;
};

// Derived statistics for one group; this is the record the aggregate file
// format carries. Metric means are NaN for groups without any multi-author
// contribution.
struct GroupStats {
  double weight = 0.0;             // fractional publication count
  std::int64_t publications = 0;   // raw contributing records
  double mean_authors = std::numeric_limits<double>::quiet_NaN();
  double pct_alphabetical = std::numeric_limits<double>::quiet_NaN();
  double pct_intentional = std::numeric_limits<double>::quiet_NaN();
  double mean_score = std::numeric_limits<double>::quiet_NaN();
};

/// Groups whose weighted mean intent estimate is substantially negative at
/// scale suggest the non-alphabetical orderings are not order-agnostic.
inline bool negative_intent_warning(const GroupStats& s, double weight_floor = 1000.0) {
  return s.weight >= weight_floor && std::isfinite(s.pct_intentional) && s.pct_intentional < -0.01;
}

class GroupAccumulator {
 public:
  /// Folds one multi-author publication in with the given fractional weight.
  void add(const OrderingMetrics& m, double weight) {
    check_weight(weight);
    weight_.add(weight);
    metric_weight_.add(weight);
    ++publications_;
    author_sum_.add(weight * m.authors);
    if (m.alphabetical) alpha_sum_.add(weight);
    intent_sum_.add(weight * m.intent_estimate);
    score_sum_.add(weight * m.score);
  }

  /// Weight-only contribution for a single-author record: counted, never
  /// scored. Only used when the caller opts in to including them.
  void add_single_author(double weight) {
    check_weight(weight);
    weight_.add(weight);
    ++publications_;
    author_sum_.add(weight);
  }

  void merge(const GroupAccumulator& other) {
    weight_.merge(other.weight_);
    metric_weight_.merge(other.metric_weight_);
    publications_ += other.publications_;
    author_sum_.merge(other.author_sum_);
    alpha_sum_.merge(other.alpha_sum_);
    intent_sum_.merge(other.intent_sum_);
    score_sum_.merge(other.score_sum_);
  }

  double weight() const { return weight_.value(); }
  std::int64_t publications() const { return publications_; }

  GroupStats stats() const {
    GroupStats s;
    s.weight = weight_.value();
    s.publications = publications_;
    if (s.weight > 0.0) s.mean_authors = author_sum_.value() / s.weight;
    const double mw = metric_weight_.value();
    if (mw > 0.0) {
      s.pct_alphabetical = alpha_sum_.value() / mw;
      s.pct_intentional = intent_sum_.value() / mw;
      s.mean_score = score_sum_.value() / mw;
    }
    return s;
  }

 private:
  static void check_weight(double weight) {
    if (!(weight > 0.0) || weight > 1.0)
      throw AggregateError("publication weight must lie in (0, 1], got " + std::to_string(weight));
  }

  KahanSum weight_;         // all contributions
  KahanSum metric_weight_;  // contributions with defined metrics (n >= 2)
  std::int64_t publications_ = 0;
  KahanSum author_sum_;     // weighted author counts
  KahanSum alpha_sum_;      // weighted alphabetical indicator
  KahanSum intent_sum_;     // weighted intent estimates
  KahanSum score_sum_;      // weighted scores
};

struct ThresholdLog {
  std::size_t kept = 0;
  std::size_t removed = 0;
  double removed_weight = 0.0;
};

namespace detail {
template <class T>
double weight_of(const T& v) {
  if constexpr (requires { v.weight(); })
    return v.weight();
  else
    return v.weight;
}
}  // namespace detail

/// Drops groups below the minimum fractional weight (strictly below: a group
/// at exactly the threshold is retained). Returns what was removed so callers
/// can log it.
template <class Key, class Group>
ThresholdLog apply_thresholds(std::map<Key, Group>& groups, double min_weight) {
  if (min_weight < 0.0) throw AggregateError("minimum group weight must be non-negative");
  ThresholdLog log;
  for (auto it = groups.begin(); it != groups.end();) {
    const double w = detail::weight_of(it->second);
    if (w < min_weight) {
      ++log.removed;
      log.removed_weight += w;
      it = groups.erase(it);
    } else {
      ++log.kept;
      ++it;
    }
  }
  return log;
}

enum class Statistic { weight, mean_authors, pct_alphabetical, pct_intentional, mean_score };

inline std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::weight: return "weight";
    case Statistic::mean_authors: return "mean_authors";
    case Statistic::pct_alphabetical: return "pct_alphabetical";
    case Statistic::pct_intentional: return "pct_intentional";
    case Statistic::mean_score: return "mean_score";
  }
  return "weight";
}

inline std::optional<Statistic> parse_statistic(std::string_view text) {
  for (Statistic s : {Statistic::weight, Statistic::mean_authors, Statistic::pct_alphabetical,
                      Statistic::pct_intentional, Statistic::mean_score})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

inline double statistic_value(const GroupStats& s, Statistic stat) {
  switch (stat) {
    case Statistic::weight: return s.weight;
    case Statistic::mean_authors: return s.mean_authors;
    case Statistic::pct_alphabetical: return s.pct_alphabetical;
    case Statistic::pct_intentional: return s.pct_intentional;
    case Statistic::mean_score: return s.mean_score;
  }
  return s.weight;
}

// One statistic over one group of publications, by year, years ascending.
struct TrendSeries {
  Statistic statistic = Statistic::pct_intentional;
  std::vector<std::pair<int, double>> points;
};

inline TrendSeries trend(const std::map<int, GroupAccumulator>& by_year, Statistic stat) {
  TrendSeries series;
  series.statistic = stat;
  series.points.reserve(by_year.size());
  for (const auto& [year, acc] : by_year)
    series.points.emplace_back(year, statistic_value(acc.stats(), stat));
  return series;
}

/// Ordinary least-squares line through the series; returns the (fractional)
/// year where the fitted line reaches zero, provided the slope is negative
/// and the crossing lies beyond the last observed year. Needs >= 2 points.
inline std::optional<double> extrapolate_zero_crossing(const TrendSeries& series) {
  const auto& pts = series.points;
  if (pts.size() < 2) throw AggregateError("extrapolation requires at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / pts.size();
  const double my = sy / pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) return std::nullopt;
  const double crossing = mx - my / slope;
  if (crossing <= pts.back().first) return std::nullopt;
  return crossing;
}

// Figure-2-style tally: every considered record counts here, single-author
// ones included, so the multi-author share is visible per year.
struct YearTally {
  std::int64_t total = 0;
  std::int64_t multi_author = 0;
};

/// Map-side accumulator for a whole corpus: routes each publication's metrics
/// into the overall, per-year, per-category and per-author-bin groups.
/// Instances merge associatively, one per worker.
class CorpusAggregator {
 public:
  // When true, single-author records also contribute weight (never metrics)
  // to the year/category groups.
  bool include_single_author_weight = false;

  void add(const Publication& pub) {
    const int n = static_cast<int>(pub.authors.size());
    auto& tally = year_tallies_[pub.year];
    ++tally.total;
    if (n < 2) {
      ++single_author_;
      if (include_single_author_weight) {
        overall_.add_single_author(1.0);
        by_year_[pub.year].add_single_author(1.0);
        for (const CategoryWeight& cw : pub.categories)
          by_category_[cw.label].add_single_author(cw.weight);
      }
      return;
    }
    ++tally.multi_author;
    const OrderingMetrics m = compute_metrics(pub);
    overall_.add(m, 1.0);
    by_year_[pub.year].add(m, 1.0);
    by_author_bin_[author_bin(n)].add(m, 1.0);
    for (const CategoryWeight& cw : pub.categories)
      by_category_[cw.label].add(m, cw.weight);
    tie_pairs_ += m.tie_pairs;
    if (has_non_latin_author(pub)) ++non_latin_pubs_;
    if (has_duplicate_author(pub)) ++duplicate_author_pubs_;
  }

  void merge(const CorpusAggregator& other) {
    overall_.merge(other.overall_);
    for (const auto& [k, v] : other.by_year_) by_year_[k].merge(v);
    for (const auto& [k, v] : other.by_category_) by_category_[k].merge(v);
    for (const auto& [k, v] : other.by_author_bin_) by_author_bin_[k].merge(v);
    for (const auto& [k, v] : other.year_tallies_) {
      year_tallies_[k].total += v.total;
      year_tallies_[k].multi_author += v.multi_author;
    }
    single_author_ += other.single_author_;
    tie_pairs_ += other.tie_pairs_;
    non_latin_pubs_ += other.non_latin_pubs_;
    duplicate_author_pubs_ += other.duplicate_author_pubs_;
  }

  const GroupAccumulator& overall() const { return overall_; }
  const std::map<int, GroupAccumulator>& by_year() const { return by_year_; }
  const std::map<std::string, GroupAccumulator>& by_category() const { return by_category_; }
  const std::map<int, GroupAccumulator>& by_author_bin() const { return by_author_bin_; }
  const std::map<int, YearTally>& year_tallies() const { return year_tallies_; }

  std::int64_t total_publications() const {
    std::int64_t t = 0;
    for (const auto& [y, tally] : year_tallies_) t += tally.total;
    return t;
  }
  std::int64_t multi_author_publications() const {
    std::int64_t t = 0;
    for (const auto& [y, tally] : year_tallies_) t += tally.multi_author;
    return t;
  }
  std::int64_t single_author_publications() const { return single_author_; }
  std::int64_t tie_pairs() const { return tie_pairs_; }
  std::int64_t non_latin_publications() const { return non_latin_pubs_; }
  std::int64_t duplicate_author_publications() const { return duplicate_author_pubs_; }

 private:
  GroupAccumulator overall_;
  std::map<int, GroupAccumulator> by_year_;
  std::map<std::string, GroupAccumulator> by_category_;
  std::map<int, GroupAccumulator> by_author_bin_;
  std::map<int, YearTally> year_tallies_;
  std::int64_t single_author_ = 0;
  std::int64_t tie_pairs_ = 0;
  std::int64_t non_latin_pubs_ = 0;
  std::int64_t duplicate_author_pubs_ = 0;
};

/// Author-count profile of a corpus: one accumulator per occupied bin
/// (exact 2..50 plus over-50).
template <class Range>
std::map<int, GroupAccumulator> author_count_profile(const Range& pubs) {
  std::map<int, GroupAccumulator> bins;
  for (const Publication& pub : pubs)
    bins[author_bin(static_cast<int>(pub.authors.size()))].add(compute_metrics(pub), 1.0);
  return bins;
}

}  // namespace byline
