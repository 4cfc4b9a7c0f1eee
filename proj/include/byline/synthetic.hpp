#pragma once

// Synthetic corpora with known ground truth.
//
// The generative model: each publication has n distinct authors; with
// probability p they choose the alphabetical byline, otherwise every
// ordering of the names is equally likely. Partial mode replaces the
// non-alphabetical branch with a uniformly chosen lead author (or several)
// followed by the remaining names in alphabetical order.
//
// All randomness is hand-rolled (xoshiro256** plus splitmix64 seeding) so a
// given config reproduces byte-identical corpora on any platform, and each
// publication index owns its own RNG stream so generation parallelizes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "byline/aggregate.hpp"
#include "byline/metrics.hpp"
#include "byline/names.hpp"

namespace byline {

class SyntheticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kAlgorithmName =
      "xoshiro256** seeded via splitmix64(seed); publication streams via "
      "splitmix64(seed ^ splitmix64-mix(index))";

  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 mix(seed);
    for (auto& word : state_) word = mix.next();
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  /// Independent stream for one publication index under a master seed.
  static Xoshiro256StarStar publication_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(index + 0x6A09E667F3BCC909ull);
    return Xoshiro256StarStar(seed ^ mix.next());
  }

  std::uint64_t operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, bound) via multiply-shift rejection.
  std::uint64_t below(std::uint64_t bound) {
    __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<__uint128_t>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

// Distribution of author counts: a fixed value, a uniform integer range, or
// an explicit histogram. Supported on n >= 2 only.
struct AuthorCountLaw {
  enum class Kind { fixed, uniform, histogram };

  Kind kind = Kind::fixed;
  int fixed = 2;
  int lo = 2, hi = 2;
  std::vector<std::pair<int, double>> histogram;  // (count, probability)

  static AuthorCountLaw fixed_count(int n) {
    AuthorCountLaw law;
    law.kind = Kind::fixed;
    law.fixed = n;
    return law;
  }
  static AuthorCountLaw uniform_range(int lo, int hi) {
    AuthorCountLaw law;
    law.kind = Kind::uniform;
    law.lo = lo;
    law.hi = hi;
    return law;
  }
  static AuthorCountLaw from_histogram(std::vector<std::pair<int, double>> bins) {
    AuthorCountLaw law;
    law.kind = Kind::histogram;
    law.histogram = std::move(bins);
    return law;
  }

  void validate() const {
    switch (kind) {
      case Kind::fixed:
        if (fixed < 2) throw SyntheticError("author count must be >= 2");
        return;
      case Kind::uniform:
        if (lo < 2 || hi < lo) throw SyntheticError("author count range must satisfy 2 <= lo <= hi");
        return;
      case Kind::histogram: {
        if (histogram.empty()) throw SyntheticError("author count histogram is empty");
        double total = 0.0;
        for (const auto& [n, p] : histogram) {
          if (n < 2) throw SyntheticError("author count histogram must be supported on n >= 2");
          if (!(p > 0.0)) throw SyntheticError("author count histogram probabilities must be positive");
          total += p;
        }
        if (!(total > 0.0)) throw SyntheticError("author count histogram has no mass");
        return;
      }
    }
  }

  int draw(Xoshiro256StarStar& rng) const {
    switch (kind) {
      case Kind::fixed:
        return fixed;
      case Kind::uniform:
        return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
      case Kind::histogram: {
        double total = 0.0;
        for (const auto& [n, p] : histogram) total += p;
        double u = rng.uniform01() * total;
        for (const auto& [n, p] : histogram) {
          u -= p;
          if (u < 0.0) return n;
        }
        return histogram.back().first;
      }
    }
    return fixed;
  }

  int min_authors() const {
    switch (kind) {
      case Kind::fixed: return fixed;
      case Kind::uniform: return lo;
      case Kind::histogram: {
        int m = histogram.front().first;
        for (const auto& [n, p] : histogram) m = std::min(m, n);
        return m;
      }
    }
    return fixed;
  }

  int max_authors() const {
    switch (kind) {
      case Kind::fixed: return fixed;
      case Kind::uniform: return hi;
      case Kind::histogram: {
        int m = histogram.front().first;
        for (const auto& [n, p] : histogram) m = std::max(m, n);
        return m;
      }
    }
    return fixed;
  }

  /// E[1/n!] under this law; the incidental component of Pr(alphabetical).
  double mean_incidental() const {
    switch (kind) {
      case Kind::fixed:
        return incidental_probability(fixed);
      case Kind::uniform: {
        double s = 0.0;
        for (int n = lo; n <= hi; ++n) s += incidental_probability(n);
        return s / (hi - lo + 1);
      }
      case Kind::histogram: {
        double total = 0.0, s = 0.0;
        for (const auto& [n, p] : histogram) {
          total += p;
          s += p * incidental_probability(n);
        }
        return s / total;
      }
    }
    return incidental_probability(fixed);
  }

  double mean_authors() const {
    switch (kind) {
      case Kind::fixed:
        return fixed;
      case Kind::uniform:
        return 0.5 * (lo + hi);
      case Kind::histogram: {
        double total = 0.0, s = 0.0;
        for (const auto& [n, p] : histogram) {
          total += p;
          s += p * n;
        }
        return s / total;
      }
    }
    return fixed;
  }

  // "fixed:5", "uniform:2-10" or "hist:2=0.5,3=0.3,5=0.2"
  static std::optional<AuthorCountLaw> parse(std::string_view text);
  std::string to_string() const;
};

inline std::optional<AuthorCountLaw> AuthorCountLaw::parse(std::string_view text) {
  const auto to_int = [](std::string_view s) -> std::optional<int> {
    if (s.empty() || s.size() > 6) return std::nullopt;
    int v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (text.starts_with("fixed:")) {
    if (auto n = to_int(text.substr(6)); n && *n >= 2) return fixed_count(*n);
    return std::nullopt;
  }
  if (text.starts_with("uniform:")) {
    const std::string_view range = text.substr(8);
    const std::size_t dash = range.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    const auto lo = to_int(range.substr(0, dash));
    const auto hi = to_int(range.substr(dash + 1));
    if (!lo || !hi || *lo < 2 || *hi < *lo) return std::nullopt;
    return uniform_range(*lo, *hi);
  }
  if (text.starts_with("hist:")) {
    std::vector<std::pair<int, double>> bins;
    std::string_view rest = text.substr(5);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view entry = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const std::size_t eq = entry.find('=');
      if (eq == std::string_view::npos) return std::nullopt;
      const auto n = to_int(entry.substr(0, eq));
      if (!n || *n < 2) return std::nullopt;
      char* end = nullptr;
      const std::string prob(entry.substr(eq + 1));
      const double p = std::strtod(prob.c_str(), &end);
      if (end != prob.c_str() + prob.size() || !(p > 0.0)) return std::nullopt;
      bins.emplace_back(*n, p);
    }
    if (bins.empty()) return std::nullopt;
    return from_histogram(std::move(bins));
  }
  return std::nullopt;
}

inline std::string AuthorCountLaw::to_string() const {
  switch (kind) {
    case Kind::fixed:
      return "fixed:" + std::to_string(fixed);
    case Kind::uniform:
      return "uniform:" + std::to_string(lo) + "-" + std::to_string(hi);
    case Kind::histogram: {
      std::string out = "hist:";
      for (std::size_t i = 0; i < histogram.size(); ++i) {
        if (i) out.push_back(',');
        char buf[48];
        std::snprintf(buf, sizeof buf, "%d=%.17g", histogram[i].first, histogram[i].second);
        out += buf;
      }
      return out;
    }
  }
  return "fixed:2";
}

// Per-publication intent probability: a constant p, a uniform range, or a
// discrete mixture of p values. The estimator targets the corpus average, so
// heterogeneous laws exercise exactly that contract.
struct IntentLaw {
  enum class Kind { constant, uniform, mixture };

  Kind kind = Kind::constant;
  double value = 0.0;
  double lo = 0.0, hi = 0.0;
  std::vector<std::pair<double, double>> mixture;  // (p, weight)

  IntentLaw() = default;
  IntentLaw(double p) : kind(Kind::constant), value(p) {}  // implicit by design

  static IntentLaw uniform_range(double lo, double hi) {
    IntentLaw law;
    law.kind = Kind::uniform;
    law.lo = lo;
    law.hi = hi;
    return law;
  }
  static IntentLaw from_mixture(std::vector<std::pair<double, double>> bins) {
    IntentLaw law;
    law.kind = Kind::mixture;
    law.mixture = std::move(bins);
    return law;
  }

  void validate() const {
    const auto check_p = [](double p) {
      if (!(p >= 0.0 && p <= 1.0)) throw SyntheticError("intent probability must lie in [0, 1]");
    };
    switch (kind) {
      case Kind::constant:
        check_p(value);
        return;
      case Kind::uniform:
        check_p(lo);
        check_p(hi);
        if (hi < lo) throw SyntheticError("intent probability range is reversed");
        return;
      case Kind::mixture: {
        if (mixture.empty()) throw SyntheticError("intent mixture is empty");
        double total = 0.0;
        for (const auto& [p, w] : mixture) {
          check_p(p);
          if (!(w > 0.0)) throw SyntheticError("intent mixture weights must be positive");
          total += w;
        }
        if (!(total > 0.0)) throw SyntheticError("intent mixture has no mass");
        return;
      }
    }
  }

  double mean() const {
    switch (kind) {
      case Kind::constant:
        return value;
      case Kind::uniform:
        return 0.5 * (lo + hi);
      case Kind::mixture: {
        double total = 0.0, sum = 0.0;
        for (const auto& [p, w] : mixture) {
          total += w;
          sum += w * p;
        }
        return sum / total;
      }
    }
    return value;
  }

  // The constant law consumes no randomness, so plain-p configurations keep
  // their byte-identical corpora.
  double draw(Xoshiro256StarStar& rng) const {
    switch (kind) {
      case Kind::constant:
        return value;
      case Kind::uniform:
        return lo + (hi - lo) * rng.uniform01();
      case Kind::mixture: {
        double total = 0.0;
        for (const auto& [p, w] : mixture) total += w;
        double u = rng.uniform01() * total;
        for (const auto& [p, w] : mixture) {
          u -= w;
          if (u < 0.0) return p;
        }
        return mixture.back().first;
      }
    }
    return value;
  }

  // "0.3", "uniform:0.1-0.5" or "mix:0.1=0.5,0.9=0.5"
  static std::optional<IntentLaw> parse(std::string_view text);
  std::string to_string() const;
};

inline std::optional<IntentLaw> IntentLaw::parse(std::string_view text) {
  const auto to_p = [](std::string_view s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const std::string str(s);
    const double p = std::strtod(str.c_str(), &end);
    if (end != str.c_str() + str.size() || !(p >= 0.0 && p <= 1.0)) return std::nullopt;
    return p;
  };
  if (text.starts_with("uniform:")) {
    const std::string_view range = text.substr(8);
    const std::size_t dash = range.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    const auto lo = to_p(range.substr(0, dash));
    const auto hi = to_p(range.substr(dash + 1));
    if (!lo || !hi || *hi < *lo) return std::nullopt;
    return uniform_range(*lo, *hi);
  }
  if (text.starts_with("mix:")) {
    std::vector<std::pair<double, double>> bins;
    std::string_view rest = text.substr(4);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view entry = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const std::size_t eq = entry.find('=');
      if (eq == std::string_view::npos) return std::nullopt;
      const auto p = to_p(entry.substr(0, eq));
      if (!p) return std::nullopt;
      char* end = nullptr;
      const std::string weight(entry.substr(eq + 1));
      const double w = std::strtod(weight.c_str(), &end);
      if (end != weight.c_str() + weight.size() || !(w > 0.0)) return std::nullopt;
      bins.emplace_back(*p, w);
    }
    if (bins.empty()) return std::nullopt;
    return from_mixture(std::move(bins));
  }
  if (const auto p = to_p(text)) return IntentLaw(*p);
  return std::nullopt;
}

inline std::string IntentLaw::to_string() const {
  char buf[64];
  switch (kind) {
    case Kind::constant:
      std::snprintf(buf, sizeof buf, "%.17g", value);
      return buf;
    case Kind::uniform:
      std::snprintf(buf, sizeof buf, "uniform:%.17g-%.17g", lo, hi);
      return buf;
    case Kind::mixture: {
      std::string out = "mix:";
      for (std::size_t i = 0; i < mixture.size(); ++i) {
        if (i) out.push_back(',');
        std::snprintf(buf, sizeof buf, "%.17g=%.17g", mixture[i].first, mixture[i].second);
        out += buf;
      }
      return out;
    }
  }
  return "0";
}

enum class OrderMode { pure, partial };

inline std::string_view to_string(OrderMode m) {
  return m == OrderMode::pure ? "pure" : "partial";
}

struct SyntheticConfig {
  std::int64_t publications = 0;
  IntentLaw intent_probability;  // constant p or a per-publication law
  AuthorCountLaw author_count_law = AuthorCountLaw::uniform_range(2, 10);
  OrderMode mode = OrderMode::pure;
  int lead_count = 1;     // partial mode: byline positions fixed before the sorted tail
  std::uint64_t seed = 0;
  int name_length = 8;
  int year_first = 2000;  // publication years drawn uniformly from this range
  int year_last = 2000;
  std::string category = "synthetic";

  void validate() const {
    if (publications < 0) throw SyntheticError("publication count must be non-negative");
    intent_probability.validate();
    author_count_law.validate();
    if (lead_count < 1) throw SyntheticError("lead count must be >= 1");
    if (name_length < 2 || name_length > 64) throw SyntheticError("name length must lie in [2, 64]");
    if (year_last < year_first) throw SyntheticError("year range is reversed");
    // The distinct-name redraw loop needs headroom in the name space.
    double space = 1.0;
    for (int i = 0; i < name_length && space < 1e9; ++i) space *= 26.0;
    if (space < 4.0 * author_count_law.max_authors())
      throw SyntheticError("name length too short for distinct author names");
  }
};

namespace detail {

inline CanonicalName random_name(Xoshiro256StarStar& rng, int length) {
  CanonicalName name;
  name.key_last.reserve(static_cast<std::size_t>(length));
  int remaining = length;
  while (remaining > 0) {
    // One 64-bit draw yields up to 8 letters without noticeable bias.
    std::uint64_t x = rng();
    for (int k = 0; k < 8 && remaining > 0; ++k, --remaining) {
      name.key_last.push_back(static_cast<char>('A' + x % 26));
      x /= 26;
    }
  }
  return name;
}

inline bool contains_name(const std::vector<CanonicalName>& names, const CanonicalName& candidate,
                          std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    if (names[i] == candidate) return true;
  return false;
}

}  // namespace detail

/// One synthetic publication: n distinct random names, alphabetical with
/// probability p, otherwise a uniformly random permutation (pure mode) or
/// lead authors followed by the sorted remainder (partial mode). Metadata
/// fields are left at their defaults; corpus generation fills them.
inline Publication generate_publication(int authors, double intent_probability, OrderMode mode,
                                        Xoshiro256StarStar& rng, int lead_count = 1,
                                        int name_length = 8) {
  if (authors < 2) throw SyntheticError("synthetic publications need at least two authors");
  if (!(intent_probability >= 0.0 && intent_probability <= 1.0))
    throw SyntheticError("intent probability must lie in [0, 1]");

  Publication pub;
  pub.authors.reserve(static_cast<std::size_t>(authors));
  for (int i = 0; i < authors; ++i) {
    CanonicalName name = detail::random_name(rng, name_length);
    while (detail::contains_name(pub.authors, name, pub.authors.size()))
      name = detail::random_name(rng, name_length);
    pub.authors.push_back(std::move(name));
  }

  const bool intentional = rng.uniform01() < intent_probability;
  if (intentional) {
    std::sort(pub.authors.begin(), pub.authors.end());
    return pub;
  }

  // Fisher-Yates: uniform over all orderings regardless of how the names
  // were produced.
  for (int i = authors - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(pub.authors[i], pub.authors[j]);
  }
  if (mode == OrderMode::partial) {
    // First lead_count positions stay as drawn (uniformly chosen leads);
    // the tail is alphabetical. A lead count of n-1 or more degenerates to
    // a plain shuffle.
    const int leads = std::min(lead_count, authors - 1);
    std::sort(pub.authors.begin() + leads, pub.authors.end());
  }
  return pub;
}

/// Streams a whole corpus into `sink(Publication&&, index)`. Each index draws
/// from its own RNG stream, so any contiguous or interleaved partition of the
/// index range generates identical publications.
template <class Sink>
void generate_corpus(const SyntheticConfig& config, Sink&& sink) {
  config.validate();
  const auto year_span = static_cast<std::uint64_t>(config.year_last - config.year_first) + 1;
  for (std::int64_t i = 0; i < config.publications; ++i) {
    auto rng = Xoshiro256StarStar::publication_stream(config.seed, static_cast<std::uint64_t>(i));
    const int year = config.year_first + static_cast<int>(year_span == 1 ? 0 : rng.below(year_span));
    const int n = config.author_count_law.draw(rng);
    const double p = config.intent_probability.draw(rng);
    Publication pub = generate_publication(n, p, config.mode, rng, config.lead_count,
                                           config.name_length);
    pub.id = "S" + std::to_string(i + 1);
    pub.year = year;
    pub.doc_type = DocType::article;
    if (!config.category.empty()) pub.categories.push_back({config.category, 1.0});
    sink(std::move(pub), i);
  }
}

inline std::vector<Publication> generate_corpus(const SyntheticConfig& config) {
  std::vector<Publication> corpus;
  corpus.reserve(static_cast<std::size_t>(config.publications));
  generate_corpus(config, [&](Publication&& pub, std::int64_t) { corpus.push_back(std::move(pub)); });
  return corpus;
}

struct ValidationReport {
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  bool pure_mode = true;
  double true_p = 0.0;
  int replications = 0;
  std::int64_t publications_per_replication = 0;

  double mean_p_hat = 0.0;
  double se_p_hat = 0.0;  // between replications (within one replication if only one)
  bool p_hat_ok = false;

  double empirical_alpha = 0.0;  // pooled Pr(byline alphabetical)
  double expected_alpha = 0.0;   // p + (1-p) * E[1/n!]
  double alpha_se = 0.0;
  bool alpha_ok = false;

  double mean_score = 0.0;  // pooled mean alphabetization score
  bool passed = false;
  std::vector<double> replication_p_hats;
  std::vector<std::string> notes;
};

/// Monte Carlo check that the intent estimator recovers the configured p:
/// runs `replications` independent corpora, compares the mean estimate with p
/// at three standard errors, and checks the pooled alphabetical frequency
/// against p + (1-p)E[1/n!]. Partial-mode configs violate the estimator's
/// model by design; the report says so and the checks are expected to fail.
inline ValidationReport validate_estimator(const SyntheticConfig& config, int replications) {
  config.validate();
  if (replications < 1) throw SyntheticError("validation needs at least one replication");
  if (config.publications < 1) throw SyntheticError("validation needs a non-empty corpus");

  ValidationReport report;
  report.rng_algorithm = Xoshiro256StarStar::kAlgorithmName;
  report.seed = config.seed;
  report.pure_mode = config.mode == OrderMode::pure;
  report.true_p = config.intent_probability.mean();
  report.replications = replications;
  report.publications_per_replication = config.publications;

  const std::int64_t per_rep = config.publications;
  KahanSum pooled_intent, pooled_intent_sq, pooled_score;
  std::int64_t alphabetical = 0;

  for (int rep = 0; rep < replications; ++rep) {
    KahanSum rep_intent;
    for (std::int64_t i = 0; i < per_rep; ++i) {
      const auto stream =
          static_cast<std::uint64_t>(rep) * static_cast<std::uint64_t>(per_rep) +
          static_cast<std::uint64_t>(i);
      auto rng = Xoshiro256StarStar::publication_stream(config.seed, stream);
      const int n = config.author_count_law.draw(rng);
      const double p = config.intent_probability.draw(rng);
      const Publication pub = generate_publication(n, p, config.mode, rng, config.lead_count,
                                                   config.name_length);
      const OrderingMetrics m = compute_metrics(pub);
      rep_intent.add(m.intent_estimate);
      pooled_intent.add(m.intent_estimate);
      pooled_intent_sq.add(m.intent_estimate * m.intent_estimate);
      pooled_score.add(m.score);
      if (m.alphabetical) ++alphabetical;
    }
    report.replication_p_hats.push_back(rep_intent.value() / static_cast<double>(per_rep));
  }

  const auto total = static_cast<double>(per_rep) * replications;
  report.mean_p_hat = pooled_intent.value() / total;
  report.mean_score = pooled_score.value() / total;

  if (replications >= 2) {
    double ss = 0.0;
    for (double v : report.replication_p_hats) {
      const double d = v - report.mean_p_hat;
      ss += d * d;
    }
    report.se_p_hat = std::sqrt(ss / (replications - 1)) / std::sqrt(double(replications));
  } else {
    const double var =
        std::max(0.0, pooled_intent_sq.value() / total - report.mean_p_hat * report.mean_p_hat);
    report.se_p_hat = std::sqrt(var / total);
  }
  report.p_hat_ok = std::abs(report.mean_p_hat - report.true_p) <= 3.0 * report.se_p_hat;

  report.empirical_alpha = static_cast<double>(alphabetical) / total;
  const double mean_p = report.true_p;  // p_i and n_i draw independently
  report.expected_alpha = mean_p + (1.0 - mean_p) * config.author_count_law.mean_incidental();
  report.alpha_se = std::sqrt(std::max(0.0, report.expected_alpha * (1.0 - report.expected_alpha)) / total);
  report.alpha_ok = std::abs(report.empirical_alpha - report.expected_alpha) <= 3.0 * report.alpha_se;

  if (!report.pure_mode)
    report.notes.push_back(
        "partial mode violates the generative model behind the estimator; "
        "unbiasedness is not expected to hold");
  if (config.intent_probability.kind != IntentLaw::Kind::constant)
    report.notes.push_back("per-publication intent law: " + config.intent_probability.to_string() +
                           "; the estimator targets its mean");
  report.passed = report.p_hat_ok && report.alpha_ok;
  return report;
}

/// (n, 1/n!) for n = 2..n_max, for plotting the incidental-probability curve.
inline std::vector<std::pair<int, double>> incidental_curve(int n_max) {
  if (n_max < 2) throw SyntheticError("incidental curve needs n_max >= 2");
  std::vector<std::pair<int, double>> curve;
  curve.reserve(static_cast<std::size_t>(n_max) - 1);
  for (int n = 2; n <= n_max; ++n) curve.emplace_back(n, incidental_probability(n));
  return curve;
}

}  // namespace byline
