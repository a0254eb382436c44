#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch2/catch_amalgamated.hpp"
#include "qf/cli.hpp"
#include "qf/survey.hpp"

using namespace qf;

namespace {

template <typename F>
ErrorKind kind_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected qf::Error");
  return ErrorKind::InternalInvariantViolation;
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {}
  ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
  void write(const std::string& text) {
    std::ofstream f(path);
    f << text;
  }
  std::string read() const {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
};

const SurveyRow* find_row(const SurveyReport& rep, long k, long p) {
  for (const SurveyRow& r : rep.rows)
    if (r.k == k && r.p == p) return &r;
  return nullptr;
}

// Minimal parser for the report CSV (plain cells, no quoting needed).
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.size() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

int dispatch(std::vector<std::string> args, std::string* out_text = nullptr,
             std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int rc = cli_dispatch(std::move(args), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("run_survey covers the k = 2, n = 3 strip") {
  SurveyConfig cfg;
  cfg.n = 3;
  cfg.k_min = 2;
  cfg.k_max = 2;
  cfg.p_max = 20;
  cfg.validate = true;
  SurveyReport rep = run_survey(cfg);

  const SurveyRow* r33 = find_row(rep, 2, 3);
  REQUIRE(r33 != nullptr);
  CHECK(r33->certified);
  CHECK(r33->claimed_order == Int(3));
  CHECK(r33->oracle_order == Int(3));

  const SurveyRow* r53 = find_row(rep, 2, 5);
  REQUIRE(r53 != nullptr);
  REQUIRE(r53->error.has_value());
  CHECK(*r53->error == "DegenerateField");

  const SurveyRow* r73 = find_row(rep, 2, 7);
  REQUIRE(r73 != nullptr);
  CHECK(r73->d == 339);
  CHECK(r73->certified);
}

TEST_CASE("run_survey finds the order-5 instance at (4, 3)") {
  SurveyConfig cfg{5, 4, 4, 10, 40, 1000000, true, 2};
  SurveyReport rep = run_survey(cfg);
  const SurveyRow* r = find_row(rep, 4, 3);
  REQUIRE(r != nullptr);
  CHECK(r->certified);
  CHECK(r->h == Int(5));
  CHECK(r->oracle_order == Int(5));
}

TEST_CASE("k = 1 never certifies: condition (i) fails everywhere") {
  SurveyConfig cfg{3, 1, 1, 50, 40, 1000000, true, 4};
  SurveyReport rep = run_survey(cfg);
  CHECK(rep.summary.certified_count == 0);
  CHECK(rep.summary.oracle_mismatches == 0);
  for (const SurveyRow& r : rep.rows) {
    if (r.error) continue;
    CHECK_FALSE(r.certified);
    CHECK(r.failed_condition == "i");
  }
}

TEST_CASE("no pair is dropped: built + errored = attempted") {
  SurveyConfig cfg{3, 1, 10, 50, 40, 1000000, false, 4};
  SurveyReport rep = run_survey(cfg);
  std::size_t primes = odd_primes_up_to(cfg.p_max).size();
  CHECK(rep.summary.pairs_attempted == 10 * primes);
  CHECK(rep.rows.size() == rep.summary.pairs_attempted);
  CHECK(rep.summary.instances_built + rep.summary.error_count ==
        rep.summary.pairs_attempted);
  // Specific error kinds surface as rows, never as omissions.
  const SurveyRow* coprime = find_row(rep, 3, 3);
  REQUIRE(coprime != nullptr);
  CHECK(coprime->error == "NotCoprime");
  const SurveyRow* size = find_row(rep, 10, 3);
  REQUIRE(size != nullptr);
  CHECK(size->error == "SizeViolation");
}

TEST_CASE("reports are byte-identical across worker counts") {
  SurveyConfig cfg{3, 1, 4, 30, 40, 1000000, true, 1};
  SurveyReport r1 = run_survey(cfg);
  cfg.workers = 4;
  SurveyReport r4 = run_survey(cfg);
  cfg.workers = 8;
  SurveyReport r8 = run_survey(cfg);
  std::string j1 = report_to_string(r1, ReportFormat::Json);
  CHECK(j1 == report_to_string(r4, ReportFormat::Json));
  CHECK(j1 == report_to_string(r8, ReportFormat::Json));
  CHECK(report_to_string(r1, ReportFormat::Csv) ==
        report_to_string(r8, ReportFormat::Csv));
}

TEST_CASE("JSON report round-trips exactly") {
  SurveyConfig cfg{5, 4, 4, 20, 40, 1000000, true, 2};
  SurveyReport rep = run_survey(cfg);
  std::string text = report_to_string(rep, ReportFormat::Json);
  SurveyReport back = report_from_json(text);
  CHECK(report_to_string(back, ReportFormat::Json) == text);
  CHECK(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i)
    CHECK(back.rows[i] == rep.rows[i]);
}

TEST_CASE("CSV round-trip preserves the row content") {
  SurveyConfig cfg{5, 4, 4, 10, 40, 1000000, true, 1};
  SurveyReport rep = run_survey(cfg);
  auto cells = parse_csv(report_to_string(rep, ReportFormat::Csv));
  REQUIRE(cells.size() == rep.rows.size() + 1);  // header
  REQUIRE(cells[0] == parse_csv(std::string(kCsvHeader) + "\n")[0]);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const SurveyRow& r = rep.rows[i];
    const std::vector<std::string>& c = cells[i + 1];
    REQUIRE(c.size() == 13);
    CHECK(c[0] == std::to_string(r.k));
    CHECK(c[1] == std::to_string(r.p));
    CHECK(c[2] == std::to_string(r.n));
    CHECK(c[3] == (r.error ? *r.error : ""));
    if (!r.error) {
      CHECK(c[4] == r.d.get_str());
      CHECK(c[5] == r.m.get_str());
      CHECK(c[6] == r.D.get_str());
      CHECK(c[8] == (r.certified ? "true" : "false"));
      CHECK(c[10] == (r.claimed_order ? r.claimed_order->get_str() : ""));
      CHECK(c[11] == (r.oracle_order ? r.oracle_order->get_str() : ""));
      CHECK(c[12] == (r.h ? r.h->get_str() : ""));
    }
  }
}

TEST_CASE("an empty report serializes and parses as a valid document") {
  SurveyReport empty;
  std::string text = report_to_string(empty, ReportFormat::Json);
  SurveyReport back = report_from_json(text);
  CHECK(back.rows.empty());
  CHECK(back.summary.pairs_attempted == 0);
  CHECK(back.summary.certified_count == 0);
  CHECK(report_to_string(back, ReportFormat::Json) == text);
  CHECK(report_to_string(empty, ReportFormat::Csv) ==
        std::string(kCsvHeader) + "\n");
}

TEST_CASE("emit_report surfaces IO failures") {
  SurveyReport empty;
  CHECK(kind_of([&] {
          emit_report(empty, ReportFormat::Json, "/nonexistent/dir/report.json");
        }) == ErrorKind::IOFailure);
}

TEST_CASE("report_from_json rejects malformed documents") {
  CHECK(kind_of([] { report_from_json("not json"); }) == ErrorKind::IOFailure);
  CHECK(kind_of([] { report_from_json("{\"schema\": 1}"); }) ==
        ErrorKind::IOFailure);
}

TEST_CASE("QF_WORKERS overrides the default worker count") {
  setenv("QF_WORKERS", "3", 1);
  CHECK(detail::default_workers() == 3);
  setenv("QF_WORKERS", "junk", 1);
  CHECK(detail::default_workers() >= 1);  // falls back to hardware default
  unsetenv("QF_WORKERS");
  CHECK(detail::default_workers() >= 1);
}

TEST_CASE("config validation") {
  SurveyConfig cfg;
  cfg.n = 4;
  CHECK(kind_of([&] { run_survey(cfg); }) == ErrorKind::ConfigInvalid);
  cfg.n = 3;
  cfg.k_min = 5;
  cfg.k_max = 2;
  CHECK(kind_of([&] { run_survey(cfg); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("config files: key = value and JSON forms agree") {
  TempFile kv("qf_test_config.cfg");
  kv.write("# sweep\nn = 5\nk_min = 4\nk_max = 4\np_max = 10\nvalidate = true\n"
           "enumeration_bound = 500000\nworkers = 2\n");
  SurveyConfig a = parse_config_file(kv.path.string());
  CHECK(a.n == 5);
  CHECK(a.k_min == 4);
  CHECK(a.k_max == 4);
  CHECK(a.p_max == 10);
  CHECK(a.validate);
  CHECK(a.enumeration_bound == 500000);
  CHECK(a.workers == 2);

  TempFile js("qf_test_config.json");
  js.write("{\"n\": 5, \"k_min\": 4, \"k_max\": 4, \"p_max\": 10,"
           " \"validate\": true, \"enumeration_bound\": \"500000\", \"workers\": 2}");
  SurveyConfig b = parse_config_file(js.path.string());
  CHECK(b.n == a.n);
  CHECK(b.k_min == a.k_min);
  CHECK(b.p_max == a.p_max);
  CHECK(b.validate == a.validate);
  CHECK(b.enumeration_bound == a.enumeration_bound);
  CHECK(b.workers == a.workers);

  TempFile bad("qf_test_config_bad.cfg");
  bad.write("n = 5\nbogus_key = 1\n");
  CHECK(kind_of([&] { parse_config_file(bad.path.string()); }) ==
        ErrorKind::ConfigInvalid);
  TempFile garbled("qf_test_config_garbled.cfg");
  garbled.write("n = notanumber\n");
  CHECK(kind_of([&] { parse_config_file(garbled.path.string()); }) ==
        ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { parse_config_file("/nonexistent/qf.cfg"); }) ==
        ErrorKind::IOFailure);
}

TEST_CASE("cli: malformed bound flags become domain errors, not crashes") {
  std::string out, err;
  int rc = dispatch({"certify", "--k", "2", "--p", "3", "--n", "3",
                     "--validate", "--enum-bound", "bogus"},
                    &out, &err);
  CHECK(rc == 1);
  CHECK(nlohmann::json::parse(err).at("error") == "ConfigInvalid");
}

TEST_CASE("certified prime counts grow monotonically with p_max") {
  std::uint64_t last = 0;
  for (long pmax : {20L, 60L, 100L}) {
    SurveyConfig cfg{5, 4, 4, pmax, 40, 1000000, false, 4};
    SurveyReport rep = run_survey(cfg);
    std::uint64_t count = rep.summary.certified_prime_count_per_k.count(4)
                              ? rep.summary.certified_prime_count_per_k.at(4)
                              : 0;
    CHECK(count >= last);
    last = count;
  }
  CHECK(last >= 3);
}

TEST_CASE("cli: certify round trip") {
  std::string out, err;
  int rc = dispatch({"certify", "--k", "2", "--p", "3", "--n", "3", "--validate"},
                    &out, &err);
  REQUIRE(rc == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j.at("certified") == true);
  CHECK(j.at("claimed_order") == 3);
  CHECK(j.at("oracle_order") == 3);
  CHECK(j.at("constructed_class") ==
        nlohmann::json::array({"2", "-1", "3"}));
}

TEST_CASE("cli: domain errors exit 1 with a machine-readable kind") {
  std::string out, err;
  int rc = dispatch({"certify", "--k", "2", "--p", "5", "--n", "3"}, &out, &err);
  REQUIRE(rc == 1);
  auto j = nlohmann::json::parse(err);
  CHECK(j.at("error") == "DegenerateField");
}

TEST_CASE("cli: usage errors exit 2") {
  std::string out, err;
  CHECK(dispatch({"certify", "--k", "2"}, &out, &err) == 2);
  CHECK(dispatch({"unknown-subcommand"}, &out, &err) == 2);
  CHECK(dispatch({}, &out, &err) == 2);
  CHECK(dispatch({"--help"}, &out, &err) == 0);
}

TEST_CASE("cli: solve prints the three solutions") {
  std::string out;
  int rc = dispatch({"solve", "--d", "2", "--k", "1", "--p", "3", "--ymax", "20"},
                    &out);
  REQUIRE(rc == 0);
  auto j = nlohmann::json::parse(out);
  REQUIRE(j.at("solutions").size() == 3);
  CHECK(j["solutions"][2]["x"] == "11");
  CHECK(j["solutions"][2]["y"] == 5);
  CHECK(dispatch({"solve", "--d", "2", "--k", "1", "--p", "9"}) == 1);
}

TEST_CASE("cli: classgroup and order") {
  std::string out;
  REQUIRE(dispatch({"classgroup", "--d", "23"}, &out) == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j.at("h") == 3);
  CHECK(j.at("discriminant") == "-23");

  REQUIRE(dispatch({"classgroup", "--disc", "-227"}, &out) == 0);
  CHECK(nlohmann::json::parse(out).at("h") == 5);

  CHECK(dispatch({"classgroup", "--disc", "-12"}) == 1);
  CHECK(dispatch({"classgroup"}) == 1);

  REQUIRE(dispatch({"order", "--k", "4", "--p", "3", "--n", "5"}, &out) == 0);
  CHECK(nlohmann::json::parse(out).at("order") == 5);
}

TEST_CASE("cli: exceptional membership") {
  std::string out;
  REQUIRE(dispatch({"exceptional", "--d1", "8", "--d2", "4", "--p", "3"}, &out) == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j.at("in_F").at("l") == 4);
  CHECK(j.at("in_F").at("eps") == -1);
  CHECK(j.at("in_S") == false);
  CHECK(dispatch({"exceptional", "--d1", "1", "--d2", "1", "--p", "3",
                  "--lambda-sq", "3"}) == 2);
}

TEST_CASE("cli: survey writes the requested format and honors the config file") {
  TempFile cfgf("qf_cli_survey.cfg");
  cfgf.write("n = 3\nk_min = 2\nk_max = 2\np_max = 20\nvalidate = true\n");
  TempFile outf("qf_cli_survey.json");
  REQUIRE(dispatch({"survey", "--config", cfgf.path.string(), "--out",
                    outf.path.string()}) == 0);
  SurveyReport rep = report_from_json(outf.read());
  CHECK(rep.config.n == 3);
  CHECK(rep.summary.oracle_mismatches == 0);
  REQUIRE(find_row(rep, 2, 3) != nullptr);
  CHECK(find_row(rep, 2, 3)->certified);

  // Flag overrides the file.
  TempFile outf2("qf_cli_survey2.json");
  REQUIRE(dispatch({"survey", "--config", cfgf.path.string(), "--pmax", "10",
                    "--out", outf2.path.string()}) == 0);
  CHECK(report_from_json(outf2.read()).config.p_max == 10);

  std::string out;
  REQUIRE(dispatch({"survey", "--n", "3", "--kmin", "2", "--kmax", "2",
                    "--pmax", "10", "--format", "csv"},
                   &out) == 0);
  CHECK(out.rfind("k,p,n,", 0) == 0);
  CHECK(dispatch({"survey", "--n", "4", "--kmin", "1", "--kmax", "1",
                  "--pmax", "10"}) == 1);
}
