#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "byline/cli.hpp"

namespace cli = byline::cli;
namespace exit_code = byline::cli::exit_code;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args, const std::string& stdin_data = {}) {
  std::istringstream in(stdin_data);
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(std::move(args), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// value of a `metric,value` row in a csv summary block
std::string summary_value(const std::string& text, const std::string& metric) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(metric + ",", 0) == 0) return line.substr(metric.size() + 1);
  return {};
}

std::vector<std::string> csv_lines_of_table(const std::string& text, const std::string& title) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  bool active = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      active = line.substr(2).rfind(title, 0) == 0;
      continue;
    }
    if (active && !line.empty()) lines.push_back(line);
  }
  return lines;
}

class TempDir {
 public:
  TempDir() {
    dir_ = std::filesystem::temp_directory_path() /
           ("byline_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path dir_;
};

}  // namespace

TEST_CASE("score reproduces the four-author worked example", "[cli]") {
  const std::string records =
      "id,year,doc_type,authors,categories\n"
      "W1,2011,article,\"SMITH, A; JOHNSON, B; JONES, C; WILLIAMS, D\",Economics\n";
  const auto r = run_cli({"score", "-", "--format", "csv"}, records);
  REQUIRE(r.code == exit_code::ok);
  const auto lines = [&] {
    std::vector<std::string> out;
    std::istringstream in(r.out);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
  }();
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "id,year,authors,alphabetical,adjacent_pairs,tie_pairs,score,intent_estimate");
  // id,year,n,a,m,ties,score,p_hat
  CHECK(lines[1].rfind("W1,2011,4,0,2,0,", 0) == 0);
  const auto fields = byline::detail::split_csv_row(lines[1]);
  REQUIRE(fields.size() == 8);
  CHECK_THAT(std::stod(fields[6]), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
  CHECK_THAT(std::stod(fields[7]),
             Catch::Matchers::WithinAbs((0.0 - 1.0 / 24.0) / (1.0 - 1.0 / 24.0), 1e-12));

  // aligned output shows the same numbers with three decimals
  const auto aligned = run_cli({"score", "-"}, records);
  REQUIRE(aligned.code == exit_code::ok);
  CHECK(aligned.out.find("0.333") != std::string::npos);
}

TEST_CASE("score skips single-author records with a diagnostic", "[cli]") {
  const std::string records =
      "id,year,doc_type,authors,categories\n"
      "W1,2011,article,\"SMITH, A\",\n"
      "W2,2011,article,\"SMITH, A; JONES, B\",\n";
  const auto r = run_cli({"score", "-", "--format", "csv"}, records);
  REQUIRE(r.code == exit_code::ok);
  CHECK(r.out.find("W2") != std::string::npos);
  CHECK(r.out.find("W1") == std::string::npos);
  CHECK(r.err.find("skipped 1 single-author") != std::string::npos);
}

TEST_CASE("simulate is byte-identical for a fixed seed", "[cli]") {
  const std::vector<std::string> args = {"simulate", "-n", "300",  "-p",     "0.4",
                                         "--seed",   "77", "--authors", "uniform:2-6"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  REQUIRE(a.code == exit_code::ok);
  CHECK(a.out == b.out);

  auto different = args;
  different[6] = "78";
  const auto c = run_cli(different);
  CHECK(a.out != c.out);
}

TEST_CASE("simulate then analyze recovers the configured intent probability", "[cli]") {
  const auto sim = run_cli({"simulate", "-n", "6000", "-p", "0.3", "--seed", "11",
                            "--authors", "uniform:2-6", "--year", "2005", "--year-to", "2008"});
  REQUIRE(sim.code == exit_code::ok);

  const auto an = run_cli({"analyze", "-", "--format", "csv", "--min-weight", "0",
                           "--workers", "1"},
                          sim.out);
  REQUIRE(an.code == exit_code::ok);
  CHECK(summary_value(an.out, "records_read") == "6000");
  CHECK(summary_value(an.out, "parse_errors") == "0");
  // sd(p-hat_i) <= 1, so 3 SE at N=6000 is under 0.04
  CHECK_THAT(std::stod(summary_value(an.out, "pct_intentional")),
             Catch::Matchers::WithinAbs(0.3, 0.05));

  // the same numbers under more workers, within float reassociation slack
  const auto an2 = run_cli({"analyze", "-", "--format", "csv", "--min-weight", "0",
                            "--workers", "3"},
                           sim.out);
  REQUIRE(an2.code == exit_code::ok);
  CHECK_THAT(std::stod(summary_value(an2.out, "pct_intentional")),
             Catch::Matchers::WithinRel(std::stod(summary_value(an.out, "pct_intentional")),
                                        1e-12));
  CHECK(summary_value(an2.out, "multi_author") == summary_value(an.out, "multi_author"));
}

TEST_CASE("analyze writes aggregate files that read back", "[cli]") {
  TempDir tmp;
  const auto sim = run_cli({"simulate", "-n", "800", "-p", "0.6", "--seed", "5",
                            "--authors", "uniform:2-4"});
  REQUIRE(sim.code == exit_code::ok);
  const std::string prefix = tmp.path("agg");
  const auto an = run_cli({"analyze", "-", "--min-weight", "0", "--out-prefix", prefix,
                           "--workers", "1"},
                          sim.out);
  REQUIRE(an.code == exit_code::ok);

  for (const std::string suffix : {".categories.csv", ".years.csv", ".author_bins.csv"}) {
    std::ifstream file(prefix + suffix);
    REQUIRE(file.good());
    const auto groups = byline::read_aggregates(file);
    REQUIRE_FALSE(groups.empty());
    double weight = 0.0;
    for (const auto& [key, s] : groups) weight += s.weight;
    CHECK_THAT(weight, Catch::Matchers::WithinRel(800.0, 1e-9));
  }
}

TEST_CASE("analyze errors cleanly on missing and malformed input", "[cli]") {
  const auto missing = run_cli({"analyze", "/nonexistent/records.csv"});
  CHECK(missing.code == exit_code::io_error);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  const auto bad_header = run_cli({"analyze", "-"}, "id,authors\nW1,\"A, X; B, Y\"\n");
  CHECK(bad_header.code == exit_code::format_error);
  CHECK(bad_header.err.find("year") != std::string::npos);

  const std::string singles =
      "id,year,doc_type,authors,categories\n"
      "W1,2011,article,\"SMITH, A\",\n"
      "W2,2011,article,\"JONES, B\",\n";
  const auto empty = run_cli({"analyze", "-"}, singles);
  CHECK(empty.code == exit_code::empty_corpus);
  CHECK(empty.err.find("no multi-author publications") != std::string::npos);
}

TEST_CASE("usage errors exit with the dedicated code", "[cli]") {
  CHECK(run_cli({"frobnicate"}).code == exit_code::usage);
  CHECK(run_cli({}).code == exit_code::usage);
  CHECK(run_cli({"simulate"}).code == exit_code::usage);  // missing -n
  CHECK(run_cli({"--help"}).code == exit_code::ok);
  CHECK(run_cli({"analyze", "--help"}).code == exit_code::ok);
}

TEST_CASE("validate passes in pure mode and writes a json report", "[cli]") {
  TempDir tmp;
  const std::string json_path = tmp.path("report.json");
  const auto r = run_cli({"validate", "-p", "0.3", "-n", "4000", "--replications", "8",
                          "--authors", "fixed:2", "--seed", "31", "--json", json_path});
  REQUIRE(r.code == exit_code::ok);
  CHECK(r.out.find("result:            PASS") != std::string::npos);

  std::ifstream file(json_path);
  REQUIRE(file.good());
  const auto j = nlohmann::json::parse(file);
  CHECK(j["passed"].get<bool>());
  CHECK(j["pure_mode"].get<bool>());
  CHECK(j["replications"].get<int>() == 8);
  CHECK(j["replication_p_hats"].size() == 8);
  CHECK_THAT(j["mean_p_hat"].get<double>(), Catch::Matchers::WithinAbs(0.3, 0.05));
  CHECK(j["rng_algorithm"].get<std::string>().find("xoshiro256**") != std::string::npos);
}

TEST_CASE("validate fails with the dedicated exit code in partial mode", "[cli]") {
  const auto r = run_cli({"validate", "-p", "0", "-n", "4000", "--replications", "4",
                          "--authors", "fixed:5", "--mode", "partial", "--seed", "3"});
  CHECK(r.code == exit_code::validation_failed);
  CHECK(r.out.find("result:            FAIL") != std::string::npos);
  CHECK(r.out.find("note:") != std::string::npos);
}

TEST_CASE("trends emits a yearly series with an extrapolated crossing", "[cli]") {
  // year 2000: both alphabetical; 2001: half; slope -0.5 crosses zero at 2002
  const std::string records =
      "id,year,doc_type,authors,categories\n"
      "W1,2000,article,\"A, X; B, Y\",\n"
      "W2,2000,article,\"C, X; D, Y\",\n"
      "W3,2001,article,\"A, X; B, Y\",\n"
      "W4,2001,article,\"D, X; C, Y\",\n";
  const auto r = run_cli({"trends", "-", "--statistic", "pct_alphabetical", "--format", "csv",
                          "--extrapolate"},
                         records);
  REQUIRE(r.code == exit_code::ok);
  const auto lines = csv_lines_of_table(r.out, "trend");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "year,pct_alphabetical");
  CHECK(lines[1] == "2000,1");
  CHECK(lines[2] == "2001,0.5");
  CHECK(lines[3].rfind("zero_crossing,2002", 0) == 0);
}

TEST_CASE("trends can follow a single category", "[cli]") {
  const std::string records =
      "id,year,doc_type,authors,categories\n"
      "W1,2000,article,\"A, X; B, Y\",Economics; History\n"
      "W2,2000,article,\"B, X; A, Y\",History\n"
      "W3,2001,article,\"A, X; B, Y\",Economics\n";
  const auto econ = run_cli({"trends", "-", "--statistic", "pct_alphabetical", "--format", "csv",
                             "--category", "Economics"},
                            records);
  REQUIRE(econ.code == exit_code::ok);
  const auto lines = csv_lines_of_table(econ.out, "trend");
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == "2000,1");  // only the Economics half of W1
  CHECK(lines[2] == "2001,1");

  const auto none = run_cli({"trends", "-", "--category", "Physics", "--format", "csv"}, records);
  REQUIRE(none.code == exit_code::ok);
  CHECK(none.err.find("no data") != std::string::npos);
}

TEST_CASE("analyze respects year filters", "[cli]") {
  const std::string records =
      "id,year,doc_type,authors,categories\n"
      "W1,1999,article,\"A, X; B, Y\",\n"
      "W2,2005,article,\"A, X; B, Y\",\n"
      "W3,2011,article,\"A, X; B, Y\",\n";
  const auto r = run_cli({"analyze", "-", "--format", "csv", "--min-weight", "0",
                          "--year-from", "2000", "--year-to", "2010"},
                         records);
  REQUIRE(r.code == exit_code::ok);
  CHECK(summary_value(r.out, "publications") == "1");
  CHECK(summary_value(r.out, "year_filtered") == "2");
}

TEST_CASE("jsonl input is accepted end to end", "[cli]") {
  const auto sim = run_cli({"simulate", "-n", "50", "-p", "0.5", "--seed", "2",
                            "--record-format", "jsonl"});
  REQUIRE(sim.code == exit_code::ok);
  CHECK(sim.out.front() == '{');
  const auto an = run_cli({"analyze", "-", "--format", "csv", "--min-weight", "0"}, sim.out);
  REQUIRE(an.code == exit_code::ok);
  CHECK(summary_value(an.out, "records_read") == "50");
  CHECK(summary_value(an.out, "parse_errors") == "0");
}

TEST_CASE("analyze output is byte-identical across runs", "[cli]") {
  const auto sim = run_cli({"simulate", "-n", "1000", "-p", "0.25", "--seed", "8",
                            "--authors", "uniform:2-5", "--year", "1995", "--year-to", "2005"});
  REQUIRE(sim.code == exit_code::ok);
  const std::vector<std::string> args = {"analyze", "-", "--format", "csv", "--min-weight", "0",
                                         "--workers", "2"};
  const auto a = run_cli(args, sim.out);
  const auto b = run_cli(args, sim.out);
  REQUIRE(a.code == exit_code::ok);
  CHECK(a.out == b.out);
}

TEST_CASE("validate accepts a mixture intent law", "[cli]") {
  const auto r = run_cli({"validate", "-p", "mix:0.1=0.5,0.9=0.5", "-n", "3000",
                          "--replications", "6", "--authors", "fixed:3", "--seed", "41"});
  REQUIRE(r.code == exit_code::ok);
  CHECK(r.out.find("true p:            0.5") != std::string::npos);
  CHECK(r.out.find("intent law") != std::string::npos);

  const auto bad = run_cli({"validate", "-p", "nonsense"});
  CHECK(bad.code == exit_code::failure);
  CHECK(bad.err.find("intent law") != std::string::npos);
}

TEST_CASE("include-singles folds single-author weight into groups", "[cli]") {
  const std::string records =
      "id,year,doc_type,authors,categories\n"
      "W1,2011,article,\"SMITH, A\",History\n"
      "W2,2011,article,\"ADAMS, X; BAKER, Y\",History\n";
  const auto base = run_cli({"analyze", "-", "--format", "csv", "--min-weight", "0"}, records);
  REQUIRE(base.code == exit_code::ok);
  const auto cats = csv_lines_of_table(base.out, "categories");
  REQUIRE(cats.size() == 2);
  CHECK(byline::detail::split_csv_row(cats[1])[1] == "1");  // weight without the single

  const auto incl = run_cli({"analyze", "-", "--format", "csv", "--min-weight", "0",
                             "--include-singles"},
                            records);
  REQUIRE(incl.code == exit_code::ok);
  const auto cats2 = csv_lines_of_table(incl.out, "categories");
  REQUIRE(cats2.size() == 2);
  const auto fields = byline::detail::split_csv_row(cats2[1]);
  CHECK(fields[1] == "2");                       // weight now includes the single
  CHECK(fields[4] == "1");                       // pct_alphabetical still multi-author only
  CHECK_THAT(std::stod(fields[3]), Catch::Matchers::WithinRel(1.5, 1e-12));  // mean authors
}
