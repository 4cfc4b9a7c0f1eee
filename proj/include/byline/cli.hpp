#pragma once

// Command-line surface: analyze, trends, simulate, validate, score.
//
// run() is stream-based so tests drive the exact code path the binary uses.
// All primary output goes to the out stream; diagnostics and progress go to
// err. Given the same inputs, flags and seed the primary output is
// byte-identical from run to run.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "byline/aggregate.hpp"
#include "byline/metrics.hpp"
#include "byline/names.hpp"
#include "byline/pipeline.hpp"
#include "byline/records.hpp"
#include "byline/synthetic.hpp"

namespace byline::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;           // unexpected runtime error
inline constexpr int usage = 2;             // bad flags or arguments
inline constexpr int io_error = 3;          // unreadable/unwritable file
inline constexpr int format_error = 4;      // unresolvable header or schema
inline constexpr int validation_failed = 5; // estimator outside 3 SE
inline constexpr int empty_corpus = 6;      // nothing left after filtering
}  // namespace exit_code

enum class OutputFormat { aligned, csv };

namespace detail {

using byline::detail::format_double;

inline std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// percentages with one decimal in aligned tables; full precision lives in
// the delimited output
inline std::string pct(double v) { return std::isnan(v) ? "-" : fixed(v * 100.0, 1) + "%"; }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void print_table(std::ostream& out, std::string_view title, const Table& t,
                        OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "# " << title << '\n';
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (i) out << ',';
      byline::detail::write_csv_field(out, t.header[i]);
    }
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        byline::detail::write_csv_field(out, row[i]);
      }
      out << '\n';
    }
    out << '\n';
    return;
  }
  std::vector<std::size_t> width(t.header.size(), 0);
  for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
  for (const auto& row : t.rows)
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
      width[i] = std::max(width[i], row[i].size());

  out << "-- " << title << " --\n";
  const auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      if (i == 0)
        out << row[i] << std::string(width[i] - row[i].size(), ' ');
      else
        out << std::string(width[i] - row[i].size(), ' ') << row[i];
    }
    out << '\n';
  };
  emit(t.header);
  for (const auto& row : t.rows) emit(row);
  out << '\n';
}

// Reader options shared by every record-consuming command.
struct InputFlags {
  std::string input;         // path or "-" for the in stream
  std::string record_format; // "", "csv", "jsonl"
  std::string prefix_mode = "keep";
  bool no_fold_diacritics = false;
  bool all_doc_types = false;
  FieldMap fields;

  void attach(CLI::App* cmd, bool with_positional = true) {
    if (with_positional)
      cmd->add_option("input", input, "record file to read, or - for standard input")
          ->required();
    cmd->add_option("--record-format", record_format, "input format: csv or jsonl (default: sniffed)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--prefix-mode", prefix_mode,
                    "keep: name prefixes (VAN, DE, ...) are part of the last name; "
                    "strip: drop them before comparison")
        ->check(CLI::IsMember({"keep", "strip"}));
    cmd->add_flag("--no-fold-diacritics", no_fold_diacritics,
                  "compare accented letters by code point instead of folding to the base letter");
    cmd->add_flag("--all-doc-types", all_doc_types,
                  "keep every document type instead of article/note/review only");
    cmd->add_option("--id-column", fields.id, "column holding the record id");
    cmd->add_option("--year-column", fields.year, "column holding the publication year");
    cmd->add_option("--doc-type-column", fields.doc_type, "column holding the document type");
    cmd->add_option("--authors-column", fields.authors, "column holding the author list");
    cmd->add_option("--categories-column", fields.categories, "column holding the categories");
  }

  ReaderOptions reader_options() const {
    ReaderOptions opts;
    if (!record_format.empty()) opts.format = parse_record_format(record_format);
    opts.names.fold_diacritics = !no_fold_diacritics;
    opts.names.prefix_mode = prefix_mode == "strip" ? PrefixMode::strip : PrefixMode::keep;
    opts.filter_doc_types = !all_doc_types;
    opts.fields = fields;
    return opts;
  }
};

struct OpenedInput {
  std::ifstream file;
  std::istream* stream = nullptr;
};

inline OpenedInput open_input(const std::string& path, std::istream& fallback) {
  OpenedInput in;
  if (path == "-") {
    in.stream = &fallback;
    return in;
  }
  in.file.open(path, std::ios::in | std::ios::binary);
  if (!in.file) throw IoError("cannot open input file '" + path + "'");
  in.stream = &in.file;
  return in;
}

struct OpenedOutput {
  std::ofstream file;
  std::ostream* stream = nullptr;
};

inline OpenedOutput open_output(const std::string& path, std::ostream& fallback) {
  OpenedOutput out;
  if (path.empty() || path == "-") {
    out.stream = &fallback;
    return out;
  }
  out.file.open(path, std::ios::out | std::ios::binary);
  if (!out.file) throw IoError("cannot open output file '" + path + "'");
  out.stream = &out.file;
  return out;
}

inline void report_row_errors(std::ostream& err, const AnalyzeResult& result) {
  const std::size_t shown = std::min<std::size_t>(result.error_samples.size(), 10);
  for (std::size_t i = 0; i < shown; ++i)
    err << "line " << result.error_samples[i].line << ": " << result.error_samples[i].message
        << '\n';
  if (result.parse_errors > shown)
    err << "(" << (result.parse_errors - shown) << " further malformed rows not shown)\n";
}

inline std::string cell(double v, OutputFormat format, bool percent_style) {
  if (format == OutputFormat::csv) return format_double(v);
  return percent_style ? pct(v) : fixed(v, 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeFlags {
  detail::InputFlags input;
  std::string format = "aligned";
  int workers = 0;
  double min_weight = 1000.0;
  std::optional<int> year_from, year_to;
  bool include_singles = false;
  bool exclude_non_latin = false;
  std::string out_prefix;
};

namespace detail {

inline AnalyzeOptions analyze_options(const AnalyzeFlags& flags) {
  AnalyzeOptions opts;
  opts.reader = flags.input.reader_options();
  opts.workers = flags.workers;
  opts.multi_author_only = !flags.include_singles;
  opts.exclude_non_latin = flags.exclude_non_latin;
  opts.year_from = flags.year_from;
  opts.year_to = flags.year_to;
  return opts;
}

inline Table summary_table(const AnalyzeResult& r, OutputFormat format) {
  const auto& agg = r.aggregator;
  const GroupStats overall = agg.overall().stats();
  const auto total = agg.total_publications();
  const auto multi = agg.multi_author_publications();
  const double share = total > 0 ? double(multi) / double(total) : 0.0;

  Table t;
  t.header = {"metric", "value"};
  const auto count = [&](std::string name, long long v) {
    t.rows.push_back({std::move(name), std::to_string(v)});
  };
  const auto value = [&](std::string name, double v, bool percent_style) {
    t.rows.push_back({std::move(name), cell(v, format, percent_style)});
  };
  count("records_read", static_cast<long long>(r.rows));
  count("parse_errors", static_cast<long long>(r.parse_errors));
  count("doc_type_filtered", static_cast<long long>(r.doc_type_filtered));
  count("year_filtered", static_cast<long long>(r.year_filtered));
  count("non_latin_filtered", static_cast<long long>(r.non_latin_filtered));
  count("publications", total);
  count("multi_author", multi);
  count("single_author", agg.single_author_publications());
  value("multi_author_share", share, true);
  value("mean_authors", overall.mean_authors, false);
  value("pct_alphabetical", overall.pct_alphabetical, true);
  value("pct_intentional", overall.pct_intentional, true);
  value("mean_score", overall.mean_score, true);
  count("tie_pairs", agg.tie_pairs());
  count("non_latin_publications", agg.non_latin_publications());
  count("duplicate_author_publications", agg.duplicate_author_publications());
  return t;
}

inline std::vector<std::string> stats_cells(const GroupStats& s, OutputFormat format) {
  return {cell(s.weight, format, false), std::to_string(s.publications),
          cell(s.mean_authors, format, false), cell(s.pct_alphabetical, format, true),
          cell(s.pct_intentional, format, true), cell(s.mean_score, format, true)};
}

}  // namespace detail

inline int cmd_analyze(const AnalyzeFlags& flags, std::istream& in, std::ostream& out,
                       std::ostream& err) {
  auto input = detail::open_input(flags.input.input, in);
  const AnalyzeResult result = analyze_stream(*input.stream, detail::analyze_options(flags));
  detail::report_row_errors(err, result);

  const auto& agg = result.aggregator;
  if (agg.multi_author_publications() == 0) {
    err << "error: no multi-author publications left after filtering\n";
    return exit_code::empty_corpus;
  }

  const OutputFormat format = flags.format == "csv" ? OutputFormat::csv : OutputFormat::aligned;
  const YearSpan pooled{flags.year_from.value_or(agg.by_year().begin()->first),
                        flags.year_to.value_or(agg.by_year().rbegin()->first)};

  // category view, thresholded, ranked by intentional share
  std::map<std::string, GroupStats> categories;
  for (const auto& [label, acc] : agg.by_category()) categories[label] = acc.stats();
  const ThresholdLog threshold = apply_thresholds(categories, flags.min_weight);
  if (threshold.removed > 0)
    err << "dropped " << threshold.removed << " categories below weight " << flags.min_weight
        << " (total weight " << detail::fixed(threshold.removed_weight, 1) << ")\n";
  for (const auto& [label, stats] : categories)
    if (negative_intent_warning(stats))
      err << "warning: category '" << label
          << "' has a substantially negative intentional share; "
             "the orderings are unlikely to be order-agnostic\n";

  detail::print_table(out, "summary", detail::summary_table(result, format), format);

  detail::Table years;
  years.header = {"year",             "total", "multi_author",    "mean_authors",
                  "pct_alphabetical", "pct_intentional", "mean_score"};
  for (const auto& [year, acc] : agg.by_year()) {
    const GroupStats s = acc.stats();
    const auto tally = agg.year_tallies().at(year);
    years.rows.push_back({std::to_string(year), std::to_string(tally.total),
                          std::to_string(tally.multi_author),
                          detail::cell(s.mean_authors, format, false),
                          detail::cell(s.pct_alphabetical, format, true),
                          detail::cell(s.pct_intentional, format, true),
                          detail::cell(s.mean_score, format, true)});
  }
  detail::print_table(out, "years", years, format);

  detail::Table cats;
  cats.header = {"category",         "weight",          "publications", "mean_authors",
                 "pct_alphabetical", "pct_intentional", "mean_score",   "score_minus_intent"};
  std::vector<std::pair<std::string, GroupStats>> ranked(categories.begin(), categories.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second.pct_intentional > b.second.pct_intentional;
  });
  for (const auto& [label, s] : ranked) {
    auto row = detail::stats_cells(s, format);
    row.insert(row.begin(), label);
    row.push_back(detail::cell(s.mean_score - s.pct_intentional, format, true));
    cats.rows.push_back(std::move(row));
  }
  detail::print_table(out, "categories (" + pooled.to_string() + ", weight >= " +
                               detail::fixed(flags.min_weight, 0) + ")",
                      cats, format);

  detail::Table bins;
  bins.header = {"authors",          "weight",          "publications", "mean_authors",
                 "pct_alphabetical", "pct_intentional", "mean_score"};
  for (const auto& [bin, acc] : agg.by_author_bin()) {
    auto row = detail::stats_cells(acc.stats(), format);
    row.insert(row.begin(), author_bin_label(bin));
    bins.rows.push_back(std::move(row));
  }
  detail::print_table(out, "author_bins", bins, format);

  if (!flags.out_prefix.empty()) {
    const auto write_file = [&](const std::string& suffix,
                                const std::map<GroupKey, GroupStats>& groups) {
      const std::string path = flags.out_prefix + suffix;
      std::ofstream file(path, std::ios::out | std::ios::binary);
      if (!file) throw IoError("cannot open output file '" + path + "'");
      write_aggregates(file, groups);
    };
    std::map<GroupKey, GroupStats> rows;
    for (const auto& [label, s] : categories) {
      GroupKey key;
      key.category = label;
      key.years = pooled;
      rows[key] = s;
    }
    write_file(".categories.csv", rows);
    rows.clear();
    for (const auto& [year, acc] : agg.by_year()) {
      GroupKey key;
      key.years = YearSpan::single(year);
      rows[key] = acc.stats();
    }
    write_file(".years.csv", rows);
    rows.clear();
    for (const auto& [bin, acc] : agg.by_author_bin()) {
      GroupKey key;
      key.author_bin = bin;
      rows[key] = acc.stats();
    }
    write_file(".author_bins.csv", rows);
  }
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// trends
// ---------------------------------------------------------------------------

struct TrendsFlags {
  detail::InputFlags input;
  std::string format = "aligned";
  int workers = 0;
  std::string statistic = "pct_intentional";
  std::string category;
  bool extrapolate = false;
  std::optional<int> year_from, year_to;
};

inline int cmd_trends(const TrendsFlags& flags, std::istream& in, std::ostream& out,
                      std::ostream& err) {
  auto input = detail::open_input(flags.input.input, in);
  AnalyzeOptions opts;
  opts.reader = flags.input.reader_options();
  opts.workers = flags.workers;
  opts.year_from = flags.year_from;
  opts.year_to = flags.year_to;
  opts.track_category_years = !flags.category.empty();
  const AnalyzeResult result = analyze_stream(*input.stream, opts);
  detail::report_row_errors(err, result);

  const Statistic stat = parse_statistic(flags.statistic).value_or(Statistic::pct_intentional);
  std::map<int, GroupAccumulator> by_year;
  if (flags.category.empty()) {
    by_year = result.aggregator.by_year();
  } else {
    for (const auto& [key, acc] : result.category_years)
      if (key.first == flags.category) by_year[key.second].merge(acc);
  }
  const TrendSeries series = trend(by_year, stat);

  const OutputFormat format = flags.format == "csv" ? OutputFormat::csv : OutputFormat::aligned;
  const bool percent_style = stat == Statistic::pct_alphabetical ||
                             stat == Statistic::pct_intentional || stat == Statistic::mean_score;
  detail::Table t;
  t.header = {"year", std::string(to_string(stat))};
  for (const auto& [year, value] : series.points)
    t.rows.push_back({std::to_string(year), detail::cell(value, format, percent_style)});

  const std::string title = flags.category.empty()
                                ? "trend (" + flags.statistic + ")"
                                : "trend (" + flags.statistic + ", " + flags.category + ")";
  if (flags.extrapolate && series.points.size() >= 2) {
    const auto crossing = extrapolate_zero_crossing(series);
    t.rows.push_back({"zero_crossing", crossing ? (format == OutputFormat::csv
                                                       ? detail::format_double(*crossing)
                                                       : detail::fixed(*crossing, 1))
                                                : "none"});
  } else if (flags.extrapolate) {
    err << "extrapolation needs at least two yearly points\n";
  }
  detail::print_table(out, title, t, format);
  if (series.points.empty()) err << "note: no data matched the trend selection\n";
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateFlags {
  std::string output = "-";
  std::string record_format = "csv";
  std::int64_t publications = 0;
  std::string intent_probability = "0";
  std::string authors_law = "uniform:2-10";
  std::string mode = "pure";
  int lead_count = 1;
  std::uint64_t seed = 0;
  int name_length = 8;
  int year = 2000;
  std::optional<int> year_to;
  std::string category = "synthetic";

  SyntheticConfig config() const {
    SyntheticConfig cfg;
    cfg.publications = publications;
    const auto intent = IntentLaw::parse(intent_probability);
    if (!intent) throw SyntheticError("unrecognized intent law '" + intent_probability + "'");
    cfg.intent_probability = *intent;
    const auto law = AuthorCountLaw::parse(authors_law);
    if (!law) throw SyntheticError("unrecognized author-count law '" + authors_law + "'");
    cfg.author_count_law = *law;
    cfg.mode = mode == "partial" ? OrderMode::partial : OrderMode::pure;
    cfg.lead_count = lead_count;
    cfg.seed = seed;
    cfg.name_length = name_length;
    cfg.year_first = year;
    cfg.year_last = year_to.value_or(year);
    cfg.category = category;
    cfg.validate();
    return cfg;
  }
};

inline int cmd_simulate(const SimulateFlags& flags, std::ostream& out, std::ostream& err) {
  const SyntheticConfig cfg = flags.config();
  const RecordFormat format = parse_record_format(flags.record_format).value_or(RecordFormat::csv);
  auto output = detail::open_output(flags.output, out);
  write_record_header(*output.stream, format);
  generate_corpus(cfg, [&](Publication&& pub, std::int64_t) {
    write_record(*output.stream, pub, format);
  });
  output.stream->flush();
  err << "wrote " << cfg.publications << " records (seed " << cfg.seed << ", "
      << cfg.author_count_law.to_string() << ", mode " << to_string(cfg.mode) << ")\n";
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateFlags {
  std::int64_t publications = 100000;
  int replications = 50;
  std::string intent_probability = "0";
  std::string authors_law = "uniform:2-10";
  std::string mode = "pure";
  int lead_count = 1;
  std::uint64_t seed = 0;
  int name_length = 8;
  std::string json_path;
};

inline int cmd_validate(const ValidateFlags& flags, std::ostream& out, std::ostream& err) {
  SyntheticConfig cfg;
  cfg.publications = flags.publications;
  const auto intent = IntentLaw::parse(flags.intent_probability);
  if (!intent) throw SyntheticError("unrecognized intent law '" + flags.intent_probability + "'");
  cfg.intent_probability = *intent;
  const auto law = AuthorCountLaw::parse(flags.authors_law);
  if (!law) throw SyntheticError("unrecognized author-count law '" + flags.authors_law + "'");
  cfg.author_count_law = *law;
  cfg.mode = flags.mode == "partial" ? OrderMode::partial : OrderMode::pure;
  cfg.lead_count = flags.lead_count;
  cfg.seed = flags.seed;
  cfg.name_length = flags.name_length;

  const ValidationReport report = validate_estimator(cfg, flags.replications);

  out << "estimator validation\n"
      << "  model:             " << to_string(cfg.mode) << "\n"
      << "  rng:               " << report.rng_algorithm << "\n"
      << "  seed:              " << report.seed << "\n"
      << "  corpus:            " << report.publications_per_replication << " publications x "
      << report.replications << " replications\n"
      << "  author-count law:  " << cfg.author_count_law.to_string() << "\n"
      << "  true p:            " << detail::format_double(report.true_p) << "\n"
      << "  mean p-hat:        " << detail::format_double(report.mean_p_hat) << " (SE "
      << detail::format_double(report.se_p_hat) << ")\n"
      << "  bias within 3 SE:  " << (report.p_hat_ok ? "yes" : "NO") << "\n"
      << "  Pr(alphabetical):  " << detail::format_double(report.empirical_alpha)
      << " observed vs " << detail::format_double(report.expected_alpha) << " expected (SE "
      << detail::format_double(report.alpha_se) << ")\n"
      << "  alpha within 3 SE: " << (report.alpha_ok ? "yes" : "NO") << "\n"
      << "  mean score:        " << detail::format_double(report.mean_score) << "\n";
  for (const auto& note : report.notes) out << "  note: " << note << "\n";
  out << "  result:            " << (report.passed ? "PASS" : "FAIL") << "\n";

  if (!flags.json_path.empty()) {
    nlohmann::json j;
    j["rng_algorithm"] = report.rng_algorithm;
    j["seed"] = report.seed;
    j["pure_mode"] = report.pure_mode;
    j["true_p"] = report.true_p;
    j["replications"] = report.replications;
    j["publications_per_replication"] = report.publications_per_replication;
    j["mean_p_hat"] = report.mean_p_hat;
    j["se_p_hat"] = report.se_p_hat;
    j["p_hat_ok"] = report.p_hat_ok;
    j["empirical_alpha"] = report.empirical_alpha;
    j["expected_alpha"] = report.expected_alpha;
    j["alpha_se"] = report.alpha_se;
    j["alpha_ok"] = report.alpha_ok;
    j["mean_score"] = report.mean_score;
    j["passed"] = report.passed;
    j["replication_p_hats"] = report.replication_p_hats;
    j["notes"] = report.notes;
    auto output = detail::open_output(flags.json_path, out);
    *output.stream << j.dump(2) << '\n';
  }
  if (!report.passed) {
    err << "validation failed: estimator output is outside three standard errors\n";
    return exit_code::validation_failed;
  }
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreFlags {
  detail::InputFlags input;
  std::string format = "aligned";
  std::string output = "-";
};

inline int cmd_score(const ScoreFlags& flags, std::istream& in, std::ostream& out,
                     std::ostream& err) {
  auto input = detail::open_input(flags.input.input, in);
  auto output = detail::open_output(flags.output, out);
  const OutputFormat format = flags.format == "csv" ? OutputFormat::csv : OutputFormat::aligned;

  ReaderOptions reader_opts = flags.input.reader_options();
  RecordReader reader(*input.stream, reader_opts);
  reader.set_error_sink([&](const RecordError& e) {
    err << "line " << e.line << ": " << e.message << '\n';
  });

  if (format == OutputFormat::csv) {
    *output.stream
        << "id,year,authors,alphabetical,adjacent_pairs,tie_pairs,score,intent_estimate\n";
  } else {
    char head[160];
    std::snprintf(head, sizeof head, "%-16s %6s %7s %5s %5s %5s %9s %9s\n", "id", "year",
                  "authors", "a", "m", "ties", "score", "p_hat");
    *output.stream << head;
  }

  std::size_t scored = 0, skipped_single = 0;
  while (auto pub = reader.next()) {
    if (pub->authors.size() < 2) {
      ++skipped_single;
      continue;
    }
    const OrderingMetrics m = compute_metrics(*pub);
    ++scored;
    if (format == OutputFormat::csv) {
      byline::detail::write_csv_field(*output.stream, pub->id);
      *output.stream << ',' << pub->year << ',' << m.authors << ',' << (m.alphabetical ? 1 : 0)
                     << ',' << m.adjacent_pairs << ',' << m.tie_pairs << ','
                     << detail::format_double(m.score) << ','
                     << detail::format_double(m.intent_estimate) << '\n';
    } else {
      char row[256];
      std::snprintf(row, sizeof row, "%-16s %6d %7d %5d %5d %5d %9.3f %9.3f\n",
                    pub->id.substr(0, 16).c_str(), pub->year, m.authors, m.alphabetical ? 1 : 0,
                    m.adjacent_pairs, m.tie_pairs, m.score, m.intent_estimate);
      *output.stream << row;
    }
  }
  if (skipped_single > 0)
    err << "skipped " << skipped_single << " single-author records (metrics undefined)\n";
  err << "scored " << scored << " publications\n";
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::istream& in, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"alphabetical-authorship analysis toolkit"};
  app.require_subcommand(1);

  AnalyzeFlags analyze;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "aggregate byline metrics per category, year and author-count bin");
  analyze.input.attach(analyze_cmd);
  analyze_cmd->add_option("--format", analyze.format, "table format: aligned or csv")
      ->check(CLI::IsMember({"aligned", "csv"}));
  analyze_cmd->add_option("--workers", analyze.workers, "worker threads (0 = all cores)")
      ->envname("BYLINE_WORKERS");
  analyze_cmd->add_option("--min-weight", analyze.min_weight,
                          "drop categories below this fractional publication count");
  analyze_cmd->add_option("--year-from", analyze.year_from, "ignore records before this year");
  analyze_cmd->add_option("--year-to", analyze.year_to, "ignore records after this year");
  analyze_cmd->add_flag("--include-singles", analyze.include_singles,
                        "let single-author records contribute weight (they are never scored)");
  analyze_cmd->add_flag("--exclude-non-latin", analyze.exclude_non_latin,
                        "drop records whose byline kept non-Latin code points");
  analyze_cmd->add_option("--out-prefix", analyze.out_prefix,
                          "write <prefix>.categories.csv/.years.csv/.author_bins.csv");

  TrendsFlags trends;
  auto* trends_cmd = app.add_subcommand("trends", "yearly series of one statistic");
  trends.input.attach(trends_cmd);
  trends_cmd->add_option("--format", trends.format, "table format: aligned or csv")
      ->check(CLI::IsMember({"aligned", "csv"}));
  trends_cmd->add_option("--workers", trends.workers, "worker threads (0 = all cores)")
      ->envname("BYLINE_WORKERS");
  trends_cmd
      ->add_option("--statistic", trends.statistic, "statistic to track")
      ->check(CLI::IsMember({"weight", "mean_authors", "pct_alphabetical", "pct_intentional",
                             "mean_score"}));
  trends_cmd->add_option("--category", trends.category, "restrict to one subject category");
  trends_cmd->add_flag("--extrapolate", trends.extrapolate,
                       "append the least-squares zero crossing of the series");
  trends_cmd->add_option("--year-from", trends.year_from, "ignore records before this year");
  trends_cmd->add_option("--year-to", trends.year_to, "ignore records after this year");

  SimulateFlags simulate;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "generate a synthetic corpus with known ground truth");
  simulate_cmd->add_option("-n,--publications", simulate.publications, "number of records")
      ->required();
  simulate_cmd->add_option("-p,--intent", simulate.intent_probability,
                           "intent probability: a constant in [0,1], uniform:A-B or mix:P=W,...");
  simulate_cmd->add_option("--authors", simulate.authors_law,
                           "author-count law: fixed:N, uniform:A-B or hist:N=P,...");
  simulate_cmd->add_option("--mode", simulate.mode, "pure or partial alphabetical model")
      ->check(CLI::IsMember({"pure", "partial"}));
  simulate_cmd->add_option("--lead-count", simulate.lead_count,
                           "partial mode: byline positions fixed before the sorted tail");
  simulate_cmd->add_option("--seed", simulate.seed, "RNG seed");
  simulate_cmd->add_option("--name-length", simulate.name_length, "letters per synthetic name");
  simulate_cmd->add_option("--year", simulate.year, "publication year (range start)");
  simulate_cmd->add_option("--year-to", simulate.year_to, "publication year range end");
  simulate_cmd->add_option("--category", simulate.category, "category label for every record");
  simulate_cmd->add_option("--record-format", simulate.record_format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  simulate_cmd->add_option("-o,--output", simulate.output, "output file, - for standard output");

  ValidateFlags validate;
  auto* validate_cmd = app.add_subcommand(
      "validate", "Monte Carlo check that the intent estimator recovers the configured p");
  validate_cmd->add_option("-p,--intent", validate.intent_probability,
                           "intent probability: a constant in [0,1], uniform:A-B or mix:P=W,...");
  validate_cmd->add_option("-n,--publications", validate.publications,
                           "publications per replication");
  validate_cmd->add_option("--replications", validate.replications, "independent corpora");
  validate_cmd->add_option("--authors", validate.authors_law, "author-count law");
  validate_cmd->add_option("--mode", validate.mode, "pure or partial (partial breaks the model)")
      ->check(CLI::IsMember({"pure", "partial"}));
  validate_cmd->add_option("--lead-count", validate.lead_count, "partial-mode lead count");
  validate_cmd->add_option("--seed", validate.seed, "RNG seed");
  validate_cmd->add_option("--name-length", validate.name_length, "letters per synthetic name");
  validate_cmd->add_option("--json", validate.json_path, "write the machine-readable report here");

  ScoreFlags score;
  auto* score_cmd = app.add_subcommand("score", "per-publication metrics dump");
  score.input.attach(score_cmd);
  score_cmd->add_option("--format", score.format, "output format: aligned or csv")
      ->check(CLI::IsMember({"aligned", "csv"}));
  score_cmd->add_option("-o,--output", score.output, "output file, - for standard output");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    if (app.got_subcommand(analyze_cmd)) return cmd_analyze(analyze, in, out, err);
    if (app.got_subcommand(trends_cmd)) return cmd_trends(trends, in, out, err);
    if (app.got_subcommand(simulate_cmd)) return cmd_simulate(simulate, out, err);
    if (app.got_subcommand(validate_cmd)) return cmd_validate(validate, out, err);
    if (app.got_subcommand(score_cmd)) return cmd_score(score, in, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::io_error;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::format_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
  return exit_code::usage;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), std::cin, std::cout, std::cerr);
}

}  // namespace byline::cli
