#pragma once

// Record and aggregate file formats.
//
// Publication records travel either as delimited text (CSV with a header
// row) or as line-delimited JSON. The CSV author field holds semicolon
// separated "LAST, INITIALS" entries; commas inside a last name are not
// representable there, use the JSON format for such data. Category entries
// are "label" or "label:weight"; when no weights are given the publication
// is split equally across its categories.
//
// Aggregate tables are CSV keyed by (category, year, author_bin) with the
// group statistics columns. Doubles are written in shortest round-trip form,
// so write -> read reproduces every value bit-for-bit.

#include <array>
#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "byline/aggregate.hpp"
#include "byline/metrics.hpp"
#include "byline/names.hpp"

namespace byline {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RecordFormat { csv, jsonl };

inline std::string_view to_string(RecordFormat f) {
  return f == RecordFormat::csv ? "csv" : "jsonl";
}

inline std::optional<RecordFormat> parse_record_format(std::string_view text) {
  if (text == "csv") return RecordFormat::csv;
  if (text == "jsonl") return RecordFormat::jsonl;
  return std::nullopt;
}

// Column-name overrides for delimited input. Empty fields fall back to the
// built-in alias sets (id/ut, year/py, doc_type/dt, authors/au,
// categories/wc/sc), matched case-insensitively.
struct FieldMap {
  std::string id;
  std::string year;
  std::string doc_type;
  std::string authors;
  std::string categories;
};

struct ReaderOptions {
  std::optional<RecordFormat> format;  // nullopt: sniff the first line
  NameOptions names;
  bool filter_doc_types = true;  // keep article/note/review only
  FieldMap fields;
  std::size_t max_stored_errors = 100;
};

struct RecordError {
  std::size_t line = 0;  // 1-based, header included
  std::string message;
};

namespace detail {

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline bool csv_needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_csv_field(std::ostream& out, std::string_view field) {
  if (!csv_needs_quoting(field)) {
    out << field;
    return;
  }
  out.put('"');
  for (char c : field) {
    if (c == '"') out.put('"');
    out.put(c);
  }
  out.put('"');
}

// RFC-style splitting of one physical line. Embedded newlines inside quotes
// are not supported; the JSON format covers such data.
inline std::vector<std::string> split_csv_row(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
  return out;
}

struct ColumnMap {
  int id = -1;
  int year = -1;
  int doc_type = -1;
  int authors = -1;
  int categories = -1;
};

inline ColumnMap resolve_columns(const std::vector<std::string>& header, const FieldMap& fields) {
  const auto find = [&](std::string_view custom,
                        std::initializer_list<std::string_view> aliases) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string name = ascii_lower(trim(header[i]));
      if (!custom.empty()) {
        if (name == ascii_lower(custom)) return static_cast<int>(i);
        continue;
      }
      for (std::string_view alias : aliases)
        if (name == alias) return static_cast<int>(i);
    }
    return -1;
  };
  ColumnMap map;
  map.id = find(fields.id, {"id", "ut", "record_id", "record"});
  map.year = find(fields.year, {"year", "py", "pub_year", "publication_year"});
  map.doc_type = find(fields.doc_type, {"doc_type", "dt", "document_type", "type"});
  map.authors = find(fields.authors, {"authors", "au", "af", "author", "author_names"});
  map.categories = find(fields.categories, {"categories", "wc", "sc", "subject_categories", "category"});
  if (map.year < 0) throw FormatError("record header is missing a year column");
  if (map.authors < 0) throw FormatError("record header is missing an authors column");
  return map;
}

// "LAST, INITIALS" preferred; without a comma, a trailing token of up to
// three letters is taken as initials.
inline RawName split_author_entry(std::string_view entry) {
  entry = trim(entry);
  if (const std::size_t comma = entry.find(','); comma != std::string_view::npos)
    return {std::string(trim(entry.substr(0, comma))), std::string(trim(entry.substr(comma + 1)))};
  const std::size_t space = entry.find_last_of(" \t");
  if (space != std::string_view::npos) {
    const std::string_view tail = trim(entry.substr(space + 1));
    const bool tail_is_initials =
        !tail.empty() && tail.size() <= 3 &&
        std::all_of(tail.begin(), tail.end(), [](char c) {
          return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
        });
    if (tail_is_initials)
      return {std::string(trim(entry.substr(0, space))), std::string(tail)};
  }
  return {std::string(entry), std::string()};
}

inline bool parse_authors_field(std::string_view field, const NameOptions& names,
                                std::vector<CanonicalName>* out, std::string* error) {
  std::size_t pos = 0;
  while (pos <= field.size()) {
    const std::size_t semi = field.find(';', pos);
    const std::string_view entry =
        trim(field.substr(pos, semi == std::string_view::npos ? semi : semi - pos));
    pos = semi == std::string_view::npos ? field.size() + 1 : semi + 1;
    if (entry.empty()) continue;
    try {
      out->push_back(canonicalize(split_author_entry(entry), names));
    } catch (const InvalidNameError& e) {
      *error = e.what();
      return false;
    }
  }
  if (out->empty()) {
    *error = "record has no authors";
    return false;
  }
  return true;
}

inline bool finish_categories(std::vector<CategoryWeight>& cats, bool any_weight, bool all_weight,
                              std::string* error) {
  if (cats.empty()) return true;
  if (any_weight && !all_weight) {
    *error = "category list mixes weighted and unweighted entries";
    return false;
  }
  if (!any_weight) {
    const double equal = 1.0 / static_cast<double>(cats.size());
    for (auto& cw : cats) cw.weight = equal;
    return true;
  }
  double sum = 0.0;
  for (const auto& cw : cats) {
    if (!(cw.weight > 0.0) || cw.weight > 1.0) {
      *error = "category weight must lie in (0, 1]";
      return false;
    }
    sum += cw.weight;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    *error = "category weights sum to " + format_double(sum) + ", expected 1";
    return false;
  }
  if (sum != 1.0)
    for (auto& cw : cats) cw.weight /= sum;
  return true;
}

inline bool parse_categories_field(std::string_view field, std::vector<CategoryWeight>* out,
                                   std::string* error) {
  bool any_weight = false, all_weight = true;
  std::size_t pos = 0;
  while (pos <= field.size()) {
    const std::size_t semi = field.find(';', pos);
    const std::string_view entry =
        trim(field.substr(pos, semi == std::string_view::npos ? semi : semi - pos));
    pos = semi == std::string_view::npos ? field.size() + 1 : semi + 1;
    if (entry.empty()) continue;
    const std::size_t colon = entry.rfind(':');
    std::optional<double> weight;
    if (colon != std::string_view::npos) weight = parse_double(entry.substr(colon + 1));
    if (weight) {
      any_weight = true;
      out->push_back({std::string(trim(entry.substr(0, colon))), *weight});
    } else {
      all_weight = false;
      out->push_back({std::string(entry), 0.0});
    }
    if (out->back().label.empty()) {
      *error = "category label is empty";
      return false;
    }
  }
  return finish_categories(*out, any_weight, all_weight, error);
}

}  // namespace detail

// Parses one data row. Returns 1 on success, 0 when the row is dropped by
// the doc-type filter, -1 on a malformed row (error message filled in).
// Immutable after construction, so worker threads share one instance.
class RowParser {
 public:
  RowParser(RecordFormat format, detail::ColumnMap columns, NameOptions names,
            bool filter_doc_types)
      : format_(format), columns_(columns), names_(names), filter_doc_types_(filter_doc_types) {}

  RecordFormat format() const { return format_; }

  int parse(std::string_view line, std::size_t line_no, Publication* out,
            std::string* error) const {
    out->id.clear();
    out->year = 0;
    out->doc_type = DocType::article;
    out->authors.clear();
    out->categories.clear();
    const int rc = format_ == RecordFormat::csv ? parse_csv(line, out, error)
                                                : parse_jsonl(line, out, error);
    if (rc == 1 && out->id.empty()) out->id = "row" + std::to_string(line_no);
    return rc;
  }

 private:
  int parse_csv(std::string_view line, Publication* out, std::string* error) const {
    const std::vector<std::string> fields = detail::split_csv_row(line);
    const auto field = [&](int idx) -> std::string_view {
      return idx >= 0 && idx < static_cast<int>(fields.size()) ? std::string_view(fields[idx])
                                                               : std::string_view();
    };
    const auto year = detail::parse_int(field(columns_.year));
    if (!year) {
      *error = "invalid or missing year '" + std::string(field(columns_.year)) + "'";
      return -1;
    }
    out->year = static_cast<int>(*year);
    out->doc_type = columns_.doc_type >= 0 ? parse_doc_type(field(columns_.doc_type))
                                           : DocType::article;
    if (filter_doc_types_ && !is_analyzed_doc_type(out->doc_type)) return 0;
    out->id = std::string(detail::trim(field(columns_.id)));
    if (!detail::parse_authors_field(field(columns_.authors), names_, &out->authors, error))
      return -1;
    if (!detail::parse_categories_field(field(columns_.categories), &out->categories, error))
      return -1;
    return 1;
  }

  int parse_jsonl(std::string_view line, Publication* out, std::string* error) const {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      *error = "invalid JSON object";
      return -1;
    }
    if (!j.contains("year") || !j["year"].is_number_integer()) {
      *error = "invalid or missing year";
      return -1;
    }
    out->year = j["year"].get<int>();
    if (const auto it = j.find("doc_type"); it != j.end() && it->is_string())
      out->doc_type = parse_doc_type(it->get<std::string>());
    if (filter_doc_types_ && !is_analyzed_doc_type(out->doc_type)) return 0;
    if (const auto it = j.find("id"); it != j.end()) {
      if (it->is_string())
        out->id = it->get<std::string>();
      else if (it->is_number_integer())
        out->id = std::to_string(it->get<long long>());
    }
    const auto authors = j.find("authors");
    if (authors == j.end() || !authors->is_array() || authors->empty()) {
      *error = "record has no authors";
      return -1;
    }
    for (const auto& a : *authors) {
      RawName raw;
      if (a.is_string()) {
        raw = detail::split_author_entry(a.get<std::string>());
      } else if (a.is_object() && a.contains("last") && a["last"].is_string()) {
        raw.last = a["last"].get<std::string>();
        if (const auto it = a.find("initials"); it != a.end() && it->is_string())
          raw.initials = it->get<std::string>();
      } else {
        *error = "author entry must be a string or an object with 'last'";
        return -1;
      }
      try {
        out->authors.push_back(canonicalize(raw, names_));
      } catch (const InvalidNameError& e) {
        *error = e.what();
        return -1;
      }
    }
    bool any_weight = false, all_weight = true;
    if (const auto cats = j.find("categories"); cats != j.end() && cats->is_array()) {
      for (const auto& c : *cats) {
        if (c.is_string()) {
          all_weight = false;
          out->categories.push_back({c.get<std::string>(), 0.0});
        } else if (c.is_object() && c.contains("label") && c["label"].is_string()) {
          CategoryWeight cw{c["label"].get<std::string>(), 0.0};
          if (const auto it = c.find("weight"); it != c.end() && it->is_number()) {
            cw.weight = it->get<double>();
            any_weight = true;
          } else {
            all_weight = false;
          }
          out->categories.push_back(std::move(cw));
        } else {
          *error = "category entry must be a string or an object with 'label'";
          return -1;
        }
        if (out->categories.back().label.empty()) {
          *error = "category label is empty";
          return -1;
        }
      }
    }
    if (!detail::finish_categories(out->categories, any_weight, all_weight, error)) return -1;
    return 1;
  }

  RecordFormat format_;
  detail::ColumnMap columns_;
  NameOptions names_;
  bool filter_doc_types_;
};

/// Streaming record reader. Invalid rows are reported through the error sink
/// (default: an internal capped list) and skipped; reading continues. Memory
/// use is one line plus the capped error sample, independent of corpus size.
class RecordReader {
 public:
  explicit RecordReader(std::istream& in, ReaderOptions options = {})
      : in_(in), options_(std::move(options)) {}

  /// Next valid publication, or nullopt at end of input.
  /// Throws FormatError if the header cannot be resolved.
  std::optional<Publication> next() {
    if (!header_done_ && !read_header()) return std::nullopt;
    Publication pub;
    std::string error;
    std::size_t line_no = 0;
    std::string line;
    while (take_line(line, line_no)) {
      if (detail::trim(line).empty()) continue;
      ++rows_;
      const int rc = parser_->parse(line, line_no, &pub, &error);
      if (rc == 1) return pub;
      if (rc == 0) {
        ++doc_type_filtered_;
        continue;
      }
      ++error_count_;
      report({line_no, error});
    }
    return std::nullopt;
  }

  std::size_t rows_parsed() const { return rows_; }
  std::size_t doc_type_filtered() const { return doc_type_filtered_; }
  std::size_t error_count() const { return error_count_; }
  const std::vector<RecordError>& errors() const { return errors_; }
  void set_error_sink(std::function<void(const RecordError&)> sink) { sink_ = std::move(sink); }
  const RowParser& parser() const { return *parser_; }

 private:
  bool read_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    return true;
  }

  // Yields the stashed format-sniffing line first, then the stream.
  bool take_line(std::string& line, std::size_t& line_no) {
    if (pending_) {
      line = std::move(pending_->second);
      line_no = pending_->first;
      pending_.reset();
      return true;
    }
    if (!read_line(line)) return false;
    line_no = line_no_;
    return true;
  }

  bool read_header() {
    std::string line;
    do {
      if (!read_line(line)) return false;
    } while (detail::trim(line).empty());

    const RecordFormat format =
        options_.format ? *options_.format
                        : (detail::trim(line).front() == '{' ? RecordFormat::jsonl
                                                             : RecordFormat::csv);
    if (format == RecordFormat::csv) {
      const auto columns = detail::resolve_columns(detail::split_csv_row(line), options_.fields);
      parser_.emplace(format, columns, options_.names, options_.filter_doc_types);
    } else {
      // no header row: the sniffed line is already a record
      parser_.emplace(format, detail::ColumnMap{}, options_.names, options_.filter_doc_types);
      pending_.emplace(line_no_, std::move(line));
    }
    header_done_ = true;
    return true;
  }

  void report(const RecordError& e) {
    if (sink_) {
      sink_(e);
      return;
    }
    if (errors_.size() < options_.max_stored_errors) errors_.push_back(e);
  }

  std::istream& in_;
  ReaderOptions options_;
  std::optional<RowParser> parser_;
  bool header_done_ = false;
  std::size_t line_no_ = 0;
  std::size_t rows_ = 0;
  std::size_t doc_type_filtered_ = 0;
  std::size_t error_count_ = 0;
  std::vector<RecordError> errors_;
  std::function<void(const RecordError&)> sink_;
  std::optional<std::pair<std::size_t, std::string>> pending_;
};

inline void write_record_header(std::ostream& out, RecordFormat format) {
  if (format == RecordFormat::csv) out << "id,year,doc_type,authors,categories\n";
}

inline void write_record(std::ostream& out, const Publication& pub, RecordFormat format) {
  if (format == RecordFormat::csv) {
    detail::write_csv_field(out, pub.id);
    out << ',' << pub.year << ',' << to_string(pub.doc_type) << ',';
    std::string authors;
    for (std::size_t i = 0; i < pub.authors.size(); ++i) {
      if (i) authors += "; ";
      authors += pub.authors[i].key_last;
      if (!pub.authors[i].key_initials.empty()) {
        authors += ", ";
        authors += pub.authors[i].key_initials;
      }
    }
    detail::write_csv_field(out, authors);
    out << ',';
    std::string cats;
    const double equal = pub.categories.empty() ? 0.0 : 1.0 / double(pub.categories.size());
    bool all_equal = true;
    for (const auto& cw : pub.categories) all_equal = all_equal && cw.weight == equal;
    for (std::size_t i = 0; i < pub.categories.size(); ++i) {
      if (i) cats += "; ";
      cats += pub.categories[i].label;
      if (!all_equal) {
        cats += ':';
        cats += detail::format_double(pub.categories[i].weight);
      }
    }
    detail::write_csv_field(out, cats);
    out << '\n';
    return;
  }
  nlohmann::json j;
  j["id"] = pub.id;
  j["year"] = pub.year;
  j["doc_type"] = std::string(to_string(pub.doc_type));
  auto& authors = j["authors"] = nlohmann::json::array();
  for (const auto& a : pub.authors) {
    nlohmann::json entry;
    entry["last"] = a.key_last;
    if (!a.key_initials.empty()) entry["initials"] = a.key_initials;
    authors.push_back(std::move(entry));
  }
  if (!pub.categories.empty()) {
    auto& cats = j["categories"] = nlohmann::json::array();
    for (const auto& cw : pub.categories)
      cats.push_back({{"label", cw.label}, {"weight", cw.weight}});
  }
  out << j.dump() << '\n';
}

// --- aggregate tables ------------------------------------------------------

inline constexpr std::array<std::string_view, 9> kAggregateColumns = {
    "category",         "year",          "author_bin",
    "weight",           "publications",  "mean_authors",
    "pct_alphabetical", "pct_intentional", "mean_score",
};

/// One row per group key, keys and doubles in lossless text form.
inline void write_aggregates(std::ostream& out, const std::map<GroupKey, GroupStats>& groups) {
  for (std::size_t i = 0; i < kAggregateColumns.size(); ++i)
    out << (i ? "," : "") << kAggregateColumns[i];
  out << '\n';
  for (const auto& [key, s] : groups) {
    detail::write_csv_field(out, key.category.value_or(""));
    out << ',' << (key.years ? key.years->to_string() : "") << ','
        << (key.author_bin ? author_bin_label(*key.author_bin) : "") << ','
        << detail::format_double(s.weight) << ',' << s.publications << ','
        << detail::format_double(s.mean_authors) << ','
        << detail::format_double(s.pct_alphabetical) << ','
        << detail::format_double(s.pct_intentional) << ','
        << detail::format_double(s.mean_score) << '\n';
  }
}

/// Inverse of write_aggregates. Throws FormatError naming the offending
/// column on any schema mismatch.
inline std::map<GroupKey, GroupStats> read_aggregates(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  do {
    if (!std::getline(in, line)) throw FormatError("aggregate file is empty");
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  } while (detail::trim(line).empty());

  const std::vector<std::string> header = detail::split_csv_row(line);
  std::array<int, kAggregateColumns.size()> index;
  index.fill(-1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::ascii_lower(detail::trim(header[i]));
    bool known = false;
    for (std::size_t c = 0; c < kAggregateColumns.size(); ++c) {
      if (name == kAggregateColumns[c]) {
        if (index[c] >= 0) throw FormatError("duplicate aggregate column '" + name + "'");
        index[c] = static_cast<int>(i);
        known = true;
        break;
      }
    }
    if (!known) throw FormatError("unknown aggregate column '" + std::string(detail::trim(header[i])) + "'");
  }
  for (std::size_t c = 0; c < kAggregateColumns.size(); ++c)
    if (index[c] < 0)
      throw FormatError("aggregate file is missing column '" + std::string(kAggregateColumns[c]) + "'");

  std::map<GroupKey, GroupStats> groups;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_row(line);
    const auto field = [&](std::size_t c) -> std::string_view {
      const auto i = static_cast<std::size_t>(index[c]);
      if (i >= fields.size())
        throw FormatError("line " + std::to_string(line_no) + ": missing value for column '" +
                          std::string(kAggregateColumns[c]) + "'");
      return fields[i];
    };
    const auto number = [&](std::size_t c) -> double {
      const auto v = detail::parse_double(field(c));
      if (!v)
        throw FormatError("line " + std::to_string(line_no) + ": bad value for column '" +
                          std::string(kAggregateColumns[c]) + "'");
      return *v;
    };

    GroupKey key;
    if (const auto cat = field(0); !cat.empty()) key.category = std::string(cat);
    if (const auto yr = detail::trim(field(1)); !yr.empty()) {
      const auto span = YearSpan::parse(yr);
      if (!span)
        throw FormatError("line " + std::to_string(line_no) + ": bad value for column 'year'");
      key.years = *span;
    }
    if (const auto bin = detail::trim(field(2)); !bin.empty()) {
      const auto b = parse_author_bin(bin);
      if (!b)
        throw FormatError("line " + std::to_string(line_no) + ": bad value for column 'author_bin'");
      key.author_bin = *b;
    }
    if (!key.category && !key.years && !key.author_bin)
      throw FormatError("line " + std::to_string(line_no) + ": row has an empty group key");

    GroupStats s;
    s.weight = number(3);
    const auto pubs = detail::parse_int(field(4));
    if (!pubs)
      throw FormatError("line " + std::to_string(line_no) + ": bad value for column 'publications'");
    s.publications = *pubs;
    s.mean_authors = number(5);
    s.pct_alphabetical = number(6);
    s.pct_intentional = number(7);
    s.mean_score = number(8);
    if (!groups.emplace(std::move(key), s).second)
      throw FormatError("line " + std::to_string(line_no) + ": duplicate group key");
  }
  return groups;
}

}  // namespace byline
