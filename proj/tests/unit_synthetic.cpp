#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "byline/metrics.hpp"
#include "byline/synthetic.hpp"

using byline::AuthorCountLaw;
using byline::generate_publication;
using byline::OrderMode;
using byline::Publication;
using byline::SyntheticConfig;
using byline::SyntheticError;
using byline::ValidationReport;
using byline::Xoshiro256StarStar;

TEST_CASE("identical configs generate identical corpora", "[synthetic]") {
  SyntheticConfig cfg;
  cfg.publications = 250;
  cfg.intent_probability = 0.4;
  cfg.author_count_law = AuthorCountLaw::uniform_range(2, 8);
  cfg.seed = 12345;
  cfg.year_first = 1990;
  cfg.year_last = 2010;

  const auto a = byline::generate_corpus(cfg);
  const auto b = byline::generate_corpus(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].id == b[i].id);
    REQUIRE(a[i].year == b[i].year);
    REQUIRE(a[i].authors.size() == b[i].authors.size());
    for (std::size_t k = 0; k < a[i].authors.size(); ++k)
      REQUIRE(a[i].authors[k] == b[i].authors[k]);
  }

  cfg.seed = 54321;
  const auto c = byline::generate_corpus(cfg);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.size() && !any_difference; ++i)
    any_difference = !(a[i].authors[0] == c[i].authors[0]);
  CHECK(any_difference);
}

TEST_CASE("publication streams are index-addressable", "[synthetic]") {
  auto r1 = Xoshiro256StarStar::publication_stream(9, 1000);
  auto r2 = Xoshiro256StarStar::publication_stream(9, 1000);
  auto r3 = Xoshiro256StarStar::publication_stream(9, 1001);
  CHECK(r1() == r2());
  CHECK(r1() != r3());
}

TEST_CASE("bounded draws are in range", "[synthetic]") {
  Xoshiro256StarStar rng(3);
  for (int i = 0; i < 10000; ++i) {
    CHECK(rng.below(7) < 7);
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("authors are distinct within a publication", "[synthetic]") {
  Xoshiro256StarStar rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const Publication pub = generate_publication(10, 0.5, OrderMode::pure, rng);
    std::set<std::string> keys;
    for (const auto& a : pub.authors) keys.insert(a.key_last);
    CHECK(keys.size() == pub.authors.size());
  }
  // tight name spaces must still terminate: 2 letters, up to 26^2 names
  for (int trial = 0; trial < 100; ++trial) {
    const Publication pub = generate_publication(12, 0.0, OrderMode::pure, rng, 1, 2);
    std::set<std::string> keys;
    for (const auto& a : pub.authors) keys.insert(a.key_last);
    CHECK(keys.size() == 12);
  }
}

TEST_CASE("intent probability one always sorts the byline", "[synthetic]") {
  Xoshiro256StarStar rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(10));
    const Publication pub = generate_publication(n, 1.0, OrderMode::pure, rng);
    CHECK(byline::is_alphabetical(pub));
  }
}

TEST_CASE("two-author random bylines are alphabetical half the time", "[synthetic]") {
  Xoshiro256StarStar rng(41);
  const int trials = 40000;
  int alphabetical = 0;
  for (int t = 0; t < trials; ++t)
    if (byline::is_alphabetical(generate_publication(2, 0.0, OrderMode::pure, rng))) ++alphabetical;
  // SE = 0.0025 at 4e4 draws; 4-sigma margin with a frozen seed
  CHECK_THAT(alphabetical / double(trials), Catch::Matchers::WithinAbs(0.5, 0.01));
}

TEST_CASE("partial mode scores higher than its intent estimate", "[synthetic]") {
  Xoshiro256StarStar rng(51);
  const int trials = 30000;
  double score_sum = 0.0, intent_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto m =
        byline::compute_metrics(generate_publication(5, 0.0, OrderMode::partial, rng));
    score_sum += m.score;
    intent_sum += m.intent_estimate;
  }
  const double mean_score = score_sum / trials;
  const double mean_intent = intent_sum / trials;
  // one lead + sorted tail of 4: E[m] = 3 + 1/5, so E[s] = 0.6
  CHECK_THAT(mean_score, Catch::Matchers::WithinAbs(0.6, 0.01));
  CHECK(mean_score > mean_intent + 0.3);
}

TEST_CASE("lead count larger than the byline degenerates to a shuffle", "[synthetic]") {
  Xoshiro256StarStar rng(61);
  int alphabetical = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t)
    if (byline::is_alphabetical(generate_publication(2, 0.0, OrderMode::partial, rng, 5)))
      ++alphabetical;
  CHECK_THAT(alphabetical / double(trials), Catch::Matchers::WithinAbs(0.5, 0.015));
}

TEST_CASE("generation rejects out-of-domain parameters", "[synthetic]") {
  Xoshiro256StarStar rng(71);
  CHECK_THROWS_AS(generate_publication(1, 0.5, OrderMode::pure, rng), SyntheticError);
  CHECK_THROWS_AS(generate_publication(3, 1.5, OrderMode::pure, rng), SyntheticError);
  CHECK_THROWS_AS(generate_publication(3, -0.1, OrderMode::pure, rng), SyntheticError);

  SyntheticConfig bad;
  bad.publications = -1;
  CHECK_THROWS_AS(bad.validate(), SyntheticError);
  bad.publications = 10;
  bad.intent_probability = 2.0;
  CHECK_THROWS_AS(bad.validate(), SyntheticError);
  bad.intent_probability = 0.5;
  bad.author_count_law = AuthorCountLaw::fixed_count(1);
  CHECK_THROWS_AS(bad.validate(), SyntheticError);
  bad.author_count_law = AuthorCountLaw::fixed_count(300);
  bad.name_length = 2;  // 26^2 = 676 names is too tight for 300 distinct draws
  CHECK_THROWS_AS(bad.validate(), SyntheticError);
}

TEST_CASE("author count law parsing round-trips", "[synthetic]") {
  const auto fixed = AuthorCountLaw::parse("fixed:5");
  REQUIRE(fixed.has_value());
  CHECK(fixed->kind == AuthorCountLaw::Kind::fixed);
  CHECK(fixed->fixed == 5);
  CHECK(fixed->to_string() == "fixed:5");

  const auto uniform = AuthorCountLaw::parse("uniform:2-10");
  REQUIRE(uniform.has_value());
  CHECK(uniform->min_authors() == 2);
  CHECK(uniform->max_authors() == 10);

  const auto hist = AuthorCountLaw::parse("hist:2=0.5,3=0.25,5=0.25");
  REQUIRE(hist.has_value());
  CHECK(hist->max_authors() == 5);
  CHECK_THAT(hist->mean_authors(), Catch::Matchers::WithinRel(2.0 * 0.5 + 3 * 0.25 + 5 * 0.25, 1e-12));

  CHECK_FALSE(AuthorCountLaw::parse("uniform:10-2").has_value());
  CHECK_FALSE(AuthorCountLaw::parse("fixed:1").has_value());
  CHECK_FALSE(AuthorCountLaw::parse("poisson:3").has_value());
  CHECK_FALSE(AuthorCountLaw::parse("hist:2=-1").has_value());
}

TEST_CASE("law draws follow the requested distribution", "[synthetic]") {
  Xoshiro256StarStar rng(81);
  const auto law = AuthorCountLaw::uniform_range(2, 5);
  std::map<int, int> counts;
  const int trials = 40000;
  for (int t = 0; t < trials; ++t) ++counts[law.draw(rng)];
  REQUIRE(counts.size() == 4);
  for (const auto& [n, c] : counts)
    CHECK_THAT(c / double(trials), Catch::Matchers::WithinAbs(0.25, 0.01));

  const auto hist = AuthorCountLaw::from_histogram({{2, 0.75}, {4, 0.25}});
  counts.clear();
  for (int t = 0; t < trials; ++t) ++counts[hist.draw(rng)];
  CHECK_THAT(counts[2] / double(trials), Catch::Matchers::WithinAbs(0.75, 0.01));
  CHECK_THAT(counts[4] / double(trials), Catch::Matchers::WithinAbs(0.25, 0.01));
}

TEST_CASE("mean incidental probability matches the law", "[synthetic]") {
  CHECK_THAT(AuthorCountLaw::fixed_count(3).mean_incidental(),
             Catch::Matchers::WithinRel(1.0 / 6.0, 1e-14));
  const auto uniform = AuthorCountLaw::uniform_range(2, 3);
  CHECK_THAT(uniform.mean_incidental(), Catch::Matchers::WithinRel((0.5 + 1.0 / 6.0) / 2.0, 1e-14));
}

TEST_CASE("estimator validation passes in pure mode", "[synthetic]") {
  SyntheticConfig cfg;
  cfg.publications = 20000;
  cfg.intent_probability = 0.3;
  cfg.author_count_law = AuthorCountLaw::fixed_count(2);
  cfg.seed = 2024;

  const ValidationReport report = byline::validate_estimator(cfg, 10);
  CHECK(report.pure_mode);
  CHECK(report.p_hat_ok);
  CHECK(report.alpha_ok);
  CHECK(report.passed);
  CHECK(report.notes.empty());
  CHECK(report.replication_p_hats.size() == 10);
  CHECK_THAT(report.mean_p_hat, Catch::Matchers::WithinAbs(0.3, 0.02));
  CHECK_THAT(report.expected_alpha, Catch::Matchers::WithinRel(0.3 + 0.7 * 0.5, 1e-14));
  CHECK_FALSE(report.rng_algorithm.empty());
}

TEST_CASE("certain intent validates exactly with zero variance", "[synthetic]") {
  SyntheticConfig cfg;
  cfg.publications = 2000;
  cfg.intent_probability = 1.0;
  cfg.author_count_law = AuthorCountLaw::uniform_range(2, 6);
  cfg.seed = 7;

  const ValidationReport report = byline::validate_estimator(cfg, 5);
  CHECK(report.mean_p_hat == 1.0);
  CHECK(report.se_p_hat == 0.0);
  CHECK(report.passed);
  CHECK(report.empirical_alpha == 1.0);
}

TEST_CASE("partial-mode validation reports the model violation", "[synthetic]") {
  SyntheticConfig cfg;
  cfg.publications = 20000;
  cfg.intent_probability = 0.0;
  cfg.author_count_law = AuthorCountLaw::fixed_count(5);
  cfg.mode = OrderMode::partial;
  cfg.seed = 11;

  const ValidationReport report = byline::validate_estimator(cfg, 5);
  CHECK_FALSE(report.pure_mode);
  REQUIRE_FALSE(report.notes.empty());
  // one in five bylines starts with the smallest name and is fully sorted,
  // so the estimator is far off the configured p = 0
  CHECK_FALSE(report.passed);
  CHECK(report.mean_p_hat > 0.15);
  CHECK(report.mean_score > report.mean_p_hat);
}

TEST_CASE("validation rejects bad arguments", "[synthetic]") {
  SyntheticConfig cfg;
  cfg.publications = 100;
  CHECK_THROWS_AS(byline::validate_estimator(cfg, 0), SyntheticError);
  cfg.publications = 0;
  CHECK_THROWS_AS(byline::validate_estimator(cfg, 3), SyntheticError);
}

TEST_CASE("intent laws parse, average and draw correctly", "[synthetic]") {
  const auto constant = byline::IntentLaw::parse("0.3");
  REQUIRE(constant.has_value());
  CHECK(constant->kind == byline::IntentLaw::Kind::constant);
  CHECK(constant->mean() == 0.3);

  const auto uniform = byline::IntentLaw::parse("uniform:0.2-0.6");
  REQUIRE(uniform.has_value());
  CHECK_THAT(uniform->mean(), Catch::Matchers::WithinRel(0.4, 1e-12));

  const auto mix = byline::IntentLaw::parse("mix:0.1=0.5,0.9=0.5");
  REQUIRE(mix.has_value());
  CHECK_THAT(mix->mean(), Catch::Matchers::WithinRel(0.5, 1e-12));

  CHECK_FALSE(byline::IntentLaw::parse("1.5").has_value());
  CHECK_FALSE(byline::IntentLaw::parse("uniform:0.6-0.2").has_value());
  CHECK_FALSE(byline::IntentLaw::parse("beta:2-3").has_value());
  CHECK_FALSE(byline::IntentLaw::parse("mix:0.5=-1").has_value());

  Xoshiro256StarStar rng(91);
  int high = 0;
  const int trials = 40000;
  for (int t = 0; t < trials; ++t)
    if (mix->draw(rng) == 0.9) ++high;
  CHECK_THAT(high / double(trials), Catch::Matchers::WithinAbs(0.5, 0.01));
}

TEST_CASE("heterogeneous intent recovers the mean probability", "[synthetic]") {
  SyntheticConfig cfg;
  cfg.publications = 20000;
  cfg.intent_probability = *byline::IntentLaw::parse("mix:0.1=0.5,0.9=0.5");
  cfg.author_count_law = AuthorCountLaw::uniform_range(2, 4);
  cfg.seed = 313;

  const ValidationReport report = byline::validate_estimator(cfg, 8);
  CHECK(report.true_p == 0.5);
  CHECK(report.p_hat_ok);
  CHECK(report.alpha_ok);
  CHECK_THAT(report.mean_p_hat, Catch::Matchers::WithinAbs(0.5, 0.02));
  bool noted = false;
  for (const auto& note : report.notes) noted = noted || note.find("intent law") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("constant intent law leaves corpora byte-identical to plain p", "[synthetic]") {
  SyntheticConfig a, b;
  a.publications = b.publications = 50;
  a.seed = b.seed = 99;
  a.intent_probability = 0.4;                             // implicit constant law
  b.intent_probability = *byline::IntentLaw::parse("0.4");
  const auto ca = byline::generate_corpus(a);
  const auto cb = byline::generate_corpus(b);
  REQUIRE(ca.size() == cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) {
    REQUIRE(ca[i].authors.size() == cb[i].authors.size());
    for (std::size_t k = 0; k < ca[i].authors.size(); ++k)
      REQUIRE(ca[i].authors[k] == cb[i].authors[k]);
  }
}

TEST_CASE("incidental curve matches the probability function", "[synthetic]") {
  const auto curve = byline::incidental_curve(10);
  REQUIRE(curve.size() == 9);
  CHECK(curve.front().first == 2);
  CHECK(curve.front().second == 0.5);
  CHECK(curve.back().first == 10);
  CHECK(curve.back().second == byline::incidental_probability(10));
  CHECK_THAT(curve[2].second, Catch::Matchers::WithinRel(1.0 / 24.0, 1e-14));
  CHECK_THROWS_AS(byline::incidental_curve(1), SyntheticError);
}
