#pragma once

// Streaming corpus analysis with a configurable worker count.
//
// One reader thread slices the input into line batches and hands them to
// workers over small bounded queues; each worker parses rows and folds
// metrics into a private CorpusAggregator. Partials merge in worker order
// once the input is drained. With workers <= 1 everything runs inline on
// the calling thread, which is the reference path for determinism checks.
// Memory use is bounded by batch size times queue depth, not corpus size.

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <istream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "byline/aggregate.hpp"
#include "byline/records.hpp"

namespace byline {

struct AnalyzeOptions {
  ReaderOptions reader;
  int workers = 0;  // 0: pick up the hardware concurrency
  bool multi_author_only = true;
  bool exclude_non_latin = false;
  bool track_category_years = false;  // per-(category, year) groups for trends
  std::optional<int> year_from;
  std::optional<int> year_to;
  std::size_t batch_lines = 4096;
  std::size_t max_queued_batches = 8;  // per worker
  std::size_t max_stored_errors = 100;
};

struct AnalyzeResult {
  CorpusAggregator aggregator;
  std::map<std::pair<std::string, int>, GroupAccumulator> category_years;
  std::size_t rows = 0;  // non-blank data rows
  std::size_t parse_errors = 0;
  std::vector<RecordError> error_samples;  // ordered by line, capped
  std::size_t doc_type_filtered = 0;
  std::size_t year_filtered = 0;
  std::size_t non_latin_filtered = 0;
};

namespace detail {

struct LineBatch {
  std::size_t first_line = 0;  // 1-based line number of lines[0]
  std::vector<std::string> lines;
};

// Accumulating half of the pipeline; one instance per worker.
struct AnalyzeWorker {
  CorpusAggregator aggregator;
  std::map<std::pair<std::string, int>, GroupAccumulator> category_years;
  std::size_t rows = 0;
  std::size_t parse_errors = 0;
  std::vector<RecordError> error_samples;
  std::size_t doc_type_filtered = 0;
  std::size_t year_filtered = 0;
  std::size_t non_latin_filtered = 0;

  void consume(const RowParser& parser, const AnalyzeOptions& opts, const LineBatch& batch) {
    Publication pub;
    std::string error;
    for (std::size_t k = 0; k < batch.lines.size(); ++k) {
      std::string_view line = batch.lines[k];
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (trim(line).empty()) continue;
      ++rows;
      const std::size_t line_no = batch.first_line + k;
      const int rc = parser.parse(line, line_no, &pub, &error);
      if (rc == 0) {
        ++doc_type_filtered;
        continue;
      }
      if (rc < 0) {
        ++parse_errors;
        if (error_samples.size() < opts.max_stored_errors)
          error_samples.push_back({line_no, error});
        continue;
      }
      if ((opts.year_from && pub.year < *opts.year_from) ||
          (opts.year_to && pub.year > *opts.year_to)) {
        ++year_filtered;
        continue;
      }
      if (opts.exclude_non_latin && has_non_latin_author(pub)) {
        ++non_latin_filtered;
        continue;
      }
      aggregator.add(pub);
      if (opts.track_category_years && pub.authors.size() >= 2) {
        const OrderingMetrics m = compute_metrics(pub);
        for (const auto& cw : pub.categories)
          category_years[{cw.label, pub.year}].add(m, cw.weight);
      }
    }
  }

  void merge_into(AnalyzeResult& result, std::size_t cap) const {
    result.aggregator.merge(aggregator);
    for (const auto& [key, acc] : category_years) result.category_years[key].merge(acc);
    result.rows += rows;
    result.parse_errors += parse_errors;
    result.doc_type_filtered += doc_type_filtered;
    result.year_filtered += year_filtered;
    result.non_latin_filtered += non_latin_filtered;
    result.error_samples.insert(result.error_samples.end(), error_samples.begin(),
                                error_samples.end());
    std::sort(result.error_samples.begin(), result.error_samples.end(),
              [](const RecordError& a, const RecordError& b) { return a.line < b.line; });
    if (result.error_samples.size() > cap) result.error_samples.resize(cap);
  }
};

struct BatchQueue {
  std::mutex mutex;
  std::condition_variable can_push, can_pop;
  std::deque<LineBatch> batches;
  bool closed = false;
  std::size_t capacity = 8;

  void push(LineBatch&& batch) {
    std::unique_lock lock(mutex);
    can_push.wait(lock, [&] { return batches.size() < capacity; });
    batches.push_back(std::move(batch));
    can_pop.notify_one();
  }
  bool pop(LineBatch& batch) {
    std::unique_lock lock(mutex);
    can_pop.wait(lock, [&] { return !batches.empty() || closed; });
    if (batches.empty()) return false;
    batch = std::move(batches.front());
    batches.pop_front();
    can_push.notify_one();
    return true;
  }
  void close() {
    std::unique_lock lock(mutex);
    closed = true;
    can_pop.notify_all();
  }
};

// Header handling shared with RecordReader: first non-blank line decides the
// format; for CSV it is the header row, for JSONL it is already a record.
inline std::optional<RowParser> read_stream_header(std::istream& in, const ReaderOptions& options,
                                                   std::size_t& line_no,
                                                   std::optional<LineBatch>& leftover) {
  std::string line;
  do {
    if (!std::getline(in, line)) return std::nullopt;
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  } while (trim(line).empty());

  const RecordFormat format =
      options.format ? *options.format
                     : (trim(line).front() == '{' ? RecordFormat::jsonl : RecordFormat::csv);
  if (format == RecordFormat::csv) {
    const auto columns = resolve_columns(split_csv_row(line), options.fields);
    return RowParser(format, columns, options.names, options.filter_doc_types);
  }
  LineBatch first;
  first.first_line = line_no;
  first.lines.push_back(std::move(line));
  leftover = std::move(first);
  return RowParser(format, ColumnMap{}, options.names, options.filter_doc_types);
}

}  // namespace detail

inline int effective_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs the full metrics + aggregation pass over a record stream.
/// Throws FormatError when the header cannot be resolved.
inline AnalyzeResult analyze_stream(std::istream& in, const AnalyzeOptions& options) {
  AnalyzeResult result;
  result.aggregator.include_single_author_weight = !options.multi_author_only;

  std::size_t line_no = 0;
  std::optional<detail::LineBatch> leftover;
  const auto parser = detail::read_stream_header(in, options.reader, line_no, leftover);
  if (!parser) return result;  // empty input

  const int workers = effective_workers(options.workers);

  if (workers <= 1) {
    detail::AnalyzeWorker worker;
    worker.aggregator.include_single_author_weight = !options.multi_author_only;
    if (leftover) worker.consume(*parser, options, *leftover);
    detail::LineBatch batch;
    batch.first_line = line_no + 1;
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      batch.lines.push_back(std::move(line));
      if (batch.lines.size() >= options.batch_lines) {
        worker.consume(*parser, options, batch);
        batch.lines.clear();
        batch.first_line = line_no + 1;
      }
    }
    if (!batch.lines.empty()) worker.consume(*parser, options, batch);
    worker.merge_into(result, options.max_stored_errors);
    return result;
  }

  std::vector<detail::AnalyzeWorker> states(static_cast<std::size_t>(workers));
  std::deque<detail::BatchQueue> queues(static_cast<std::size_t>(workers));
  for (auto& q : queues) q.capacity = options.max_queued_batches;
  for (auto& s : states) s.aggregator.include_single_author_weight = !options.multi_author_only;

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      detail::LineBatch batch;
      while (queues[static_cast<std::size_t>(w)].pop(batch))
        states[static_cast<std::size_t>(w)].consume(*parser, options, batch);
    });
  }

  std::size_t next_worker = 0;
  if (leftover) {
    queues[next_worker].push(std::move(*leftover));
    next_worker = (next_worker + 1) % static_cast<std::size_t>(workers);
  }
  detail::LineBatch batch;
  batch.first_line = line_no + 1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    batch.lines.push_back(std::move(line));
    if (batch.lines.size() >= options.batch_lines) {
      queues[next_worker].push(std::move(batch));
      next_worker = (next_worker + 1) % static_cast<std::size_t>(workers);
      batch = detail::LineBatch{};
      batch.first_line = line_no + 1;
    }
  }
  if (!batch.lines.empty()) queues[next_worker].push(std::move(batch));
  for (auto& q : queues) q.close();
  for (auto& t : threads) t.join();

  for (const auto& s : states) s.merge_into(result, options.max_stored_errors);
  return result;
}

}  // namespace byline
