#ifndef QF_SURVEY_HPP
#define QF_SURVEY_HPP

#include <atomic>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qf/certify.hpp"

namespace qf {

/// Grid sweep parameters. `workers` is a runtime knob only; it is not part
/// of the report so identical configs serialize identically at any worker
/// count.
struct SurveyConfig {
  long n = 3;
  long k_min = 1;
  long k_max = 1;
  long p_max = 3;
  unsigned long y_max = 40;
  Int enumeration_bound = 1000000;  // |D| cap for the validation oracle
  bool validate = false;
  unsigned workers = 1;

  void check() const {
    if (n < 3 || n % 2 == 0)
      throw Error(ErrorKind::ConfigInvalid, "survey n must be odd and >= 3");
    if (k_min < 1 || k_max < k_min)
      throw Error(ErrorKind::ConfigInvalid, "survey k range is empty");
    if (p_max < 3) throw Error(ErrorKind::ConfigInvalid, "survey needs p_max >= 3");
    if (workers < 1) throw Error(ErrorKind::ConfigInvalid, "workers must be >= 1");
    if (enumeration_bound < 4)
      throw Error(ErrorKind::ConfigInvalid, "enumeration bound too small");
  }
};

/// One (k, p) outcome: either an error kind or a built instance with its
/// certification verdict.
struct SurveyRow {
  long k = 0;
  long p = 0;
  long n = 0;
  std::optional<std::string> error;
  Int d, m, D;
  bool probable_prime = false;
  bool certified = false;
  std::optional<std::string> failed_condition;  // "i", "ii" or "iii"
  std::optional<Int> claimed_order;
  std::optional<Int> oracle_order;
  std::optional<Int> h;

  friend bool operator==(const SurveyRow&, const SurveyRow&) = default;
};

struct SurveySummary {
  std::uint64_t pairs_attempted = 0;
  std::uint64_t instances_built = 0;
  std::uint64_t error_count = 0;
  std::uint64_t certified_count = 0;
  std::uint64_t oracle_matches = 0;
  std::uint64_t oracle_mismatches = 0;
  std::map<long, std::uint64_t> certified_prime_count_per_k;

  friend bool operator==(const SurveySummary&, const SurveySummary&) = default;
};

struct SurveyReport {
  SurveyConfig config;
  std::vector<SurveyRow> rows;  // sorted by (k, p)
  SurveySummary summary;
};

inline std::vector<long> odd_primes_up_to(long bound) {
  std::vector<long> ps;
  for (long p = 3; p <= bound; p += 2) {
    if (detail::is_prime_u64(static_cast<std::uint64_t>(p))) ps.push_back(p);
  }
  return ps;
}

namespace detail {

inline SurveyRow evaluate_pair(long k, long p, const SurveyConfig& cfg) {
  SurveyRow row;
  row.k = k;
  row.p = p;
  row.n = cfg.n;
  try {
    Certificate cert = certify(Int(k), Int(p), cfg.n);
    row.d = cert.instance.d;
    row.m = cert.instance.m;
    row.D = cert.instance.discriminant;
    row.probable_prime = cert.instance.p_probable_prime;
    row.certified = cert.certified;
    if (!cert.cond_i) row.failed_condition = "i";
    else if (!cert.cond_ii.ok) row.failed_condition = "ii";
    else if (!cert.cond_iii.ok) row.failed_condition = "iii";
    row.claimed_order = cert.claimed_order;
    if (cfg.validate) {
      OracleCheck check = oracle_order_of(cert.instance, cert.constructed_class,
                                          cfg.enumeration_bound);
      row.oracle_order = check.order;
      row.h = check.class_number;
    }
  } catch (const Error& e) {
    row.error = e.kind_name();
  }
  return row;
}

}  // namespace detail

/// Certifies (and optionally cross-validates) every grid pair. Work is
/// farmed over `workers` threads into index-addressed slots, so the output
/// is deterministic for any worker count. No pair is dropped: builds that
/// fail validation become error rows.
inline SurveyReport run_survey(const SurveyConfig& config) {
  config.check();
  std::vector<long> primes = odd_primes_up_to(config.p_max);
  std::vector<std::pair<long, long>> grid;
  for (long k = config.k_min; k <= config.k_max; ++k) {
    for (long p : primes) grid.emplace_back(k, p);
  }

  std::vector<SurveyRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) break;
      rows[i] = detail::evaluate_pair(grid[i].first, grid[i].second, config);
    }
  };
  unsigned nthreads =
      std::min<std::size_t>(config.workers, std::max<std::size_t>(grid.size(), 1));
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  SurveyReport report{config, std::move(rows), {}};
  SurveySummary& s = report.summary;
  s.pairs_attempted = report.rows.size();
  for (const SurveyRow& row : report.rows) {
    if (row.error) {
      ++s.error_count;
      // An oracle refusal is a mismatch, not a routine build failure; it
      // must trip the release gate.
      if (*row.error == to_string(ErrorKind::OracleMismatch)) ++s.oracle_mismatches;
      continue;
    }
    ++s.instances_built;
    if (row.certified) {
      ++s.certified_count;
      ++s.certified_prime_count_per_k[row.k];
      if (row.oracle_order) {
        if (*row.oracle_order == *row.claimed_order) ++s.oracle_matches;
        else ++s.oracle_mismatches;
      }
    }
  }
  return report;
}

// --- report serialization ---------------------------------------------

enum class ReportFormat { Json, Csv };

inline ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::ConfigInvalid, "unknown report format: " + s);
}

namespace detail {

using OrderedJson = nlohmann::ordered_json;

inline OrderedJson config_to_json(const SurveyConfig& c) {
  OrderedJson j;
  j["n"] = c.n;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["p_max"] = c.p_max;
  j["y_max"] = c.y_max;
  j["enumeration_bound"] = c.enumeration_bound.get_str();
  j["validate"] = c.validate;
  return j;
}

inline OrderedJson row_to_json(const SurveyRow& r) {
  OrderedJson j;
  j["k"] = r.k;
  j["p"] = r.p;
  j["n"] = r.n;
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["d"] = r.d.get_str();
  j["m"] = r.m.get_str();
  j["D"] = r.D.get_str();
  if (r.probable_prime) j["probable_prime"] = true;
  j["certified"] = r.certified;
  if (r.failed_condition) j["failed_condition"] = *r.failed_condition;
  if (r.claimed_order) j["claimed_order"] = r.claimed_order->get_ui();
  if (r.oracle_order) j["oracle_order"] = r.oracle_order->get_ui();
  if (r.h) j["h"] = r.h->get_ui();
  return j;
}

inline OrderedJson report_to_json(const SurveyReport& rep) {
  OrderedJson j;
  j["schema"] = 1;
  j["config"] = config_to_json(rep.config);
  j["rows"] = OrderedJson::array();
  for (const SurveyRow& r : rep.rows) j["rows"].push_back(row_to_json(r));
  OrderedJson s;
  s["pairs_attempted"] = rep.summary.pairs_attempted;
  s["instances_built"] = rep.summary.instances_built;
  s["error_count"] = rep.summary.error_count;
  s["certified_count"] = rep.summary.certified_count;
  s["oracle_matches"] = rep.summary.oracle_matches;
  s["oracle_mismatches"] = rep.summary.oracle_mismatches;
  OrderedJson per_k = OrderedJson::object();
  for (const auto& [k, count] : rep.summary.certified_prime_count_per_k)
    per_k[std::to_string(k)] = count;
  s["certified_prime_count_per_k"] = per_k;
  j["summary"] = s;
  return j;
}

inline std::string csv_cell(const std::optional<Int>& v) {
  return v ? v->get_str() : std::string();
}

}  // namespace detail

inline const char* kCsvHeader =
    "k,p,n,error,d,m,D,probable_prime,certified,failed_condition,"
    "claimed_order,oracle_order,h";

inline std::string report_to_string(const SurveyReport& rep, ReportFormat format) {
  if (format == ReportFormat::Json) return detail::report_to_json(rep).dump(2) + "\n";
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const SurveyRow& r : rep.rows) {
    os << r.k << ',' << r.p << ',' << r.n << ',';
    if (r.error) {
      os << *r.error << ",,,,,,,,,\n";
      continue;
    }
    os << ',' << r.d << ',' << r.m << ',' << r.D << ','
       << (r.probable_prime ? "true" : "false") << ','
       << (r.certified ? "true" : "false") << ','
       << (r.failed_condition ? *r.failed_condition : "") << ','
       << detail::csv_cell(r.claimed_order) << ','
       << detail::csv_cell(r.oracle_order) << ',' << detail::csv_cell(r.h)
       << "\n";
  }
  return os.str();
}

inline void emit_report(const SurveyReport& rep, ReportFormat format,
                        std::ostream& out) {
  out << report_to_string(rep, format);
  if (!out) throw Error(ErrorKind::IOFailure, "failed writing report");
}

inline void emit_report(const SurveyReport& rep, ReportFormat format,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::IOFailure, "cannot open " + path);
  emit_report(rep, format, f);
  f.close();
  if (!f) throw Error(ErrorKind::IOFailure, "failed writing " + path);
}

namespace detail {

inline SurveyReport report_from_parsed(const OrderedJson& j) {
  SurveyReport rep;
  const auto& jc = j.at("config");
  rep.config.n = jc.at("n").get<long>();
  rep.config.k_min = jc.at("k_min").get<long>();
  rep.config.k_max = jc.at("k_max").get<long>();
  rep.config.p_max = jc.at("p_max").get<long>();
  rep.config.y_max = jc.at("y_max").get<unsigned long>();
  rep.config.enumeration_bound = Int(jc.at("enumeration_bound").get<std::string>());
  rep.config.validate = jc.at("validate").get<bool>();
  for (const auto& jr : j.at("rows")) {
    SurveyRow r;
    r.k = jr.at("k").get<long>();
    r.p = jr.at("p").get<long>();
    r.n = jr.at("n").get<long>();
    if (jr.contains("error")) {
      r.error = jr.at("error").get<std::string>();
    } else {
      r.d = Int(jr.at("d").get<std::string>());
      r.m = Int(jr.at("m").get<std::string>());
      r.D = Int(jr.at("D").get<std::string>());
      r.probable_prime = jr.value("probable_prime", false);
      r.certified = jr.at("certified").get<bool>();
      if (jr.contains("failed_condition"))
        r.failed_condition = jr.at("failed_condition").get<std::string>();
      if (jr.contains("claimed_order"))
        r.claimed_order = Int(jr.at("claimed_order").get<unsigned long>());
      if (jr.contains("oracle_order"))
        r.oracle_order = Int(jr.at("oracle_order").get<unsigned long>());
      if (jr.contains("h")) r.h = Int(jr.at("h").get<unsigned long>());
    }
    rep.rows.push_back(std::move(r));
  }
  const auto& js = j.at("summary");
  rep.summary.pairs_attempted = js.at("pairs_attempted").get<std::uint64_t>();
  rep.summary.instances_built = js.at("instances_built").get<std::uint64_t>();
  rep.summary.error_count = js.at("error_count").get<std::uint64_t>();
  rep.summary.certified_count = js.at("certified_count").get<std::uint64_t>();
  rep.summary.oracle_matches = js.at("oracle_matches").get<std::uint64_t>();
  rep.summary.oracle_mismatches = js.at("oracle_mismatches").get<std::uint64_t>();
  for (const auto& [key, value] :
       js.at("certified_prime_count_per_k").items()) {
    rep.summary.certified_prime_count_per_k[std::stol(key)] =
        value.get<std::uint64_t>();
  }
  return rep;
}

}  // namespace detail

/// Inverse of the JSON emitter; re-emitting the parsed report reproduces the
/// document byte for byte.
inline SurveyReport report_from_json(const std::string& text) {
  try {
    return detail::report_from_parsed(detail::OrderedJson::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::IOFailure, std::string("bad report JSON: ") + e.what());
  }
}

/// Survey config from a file: JSON when the first character is '{', else
/// `key = value` lines with '#' comments. Keys present in the file override
/// the fields of `base`.
inline SurveyConfig parse_config_file(const std::string& path,
                                      SurveyConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::IOFailure, "cannot open " + path);
  std::stringstream buffer;
  buffer << f.rdbuf();
  std::string text = buffer.str();

  auto apply = [](SurveyConfig& c, const std::string& key, const std::string& value) {
    try {
      auto as_long = [&] { return std::stol(value); };
      if (key == "n") c.n = as_long();
      else if (key == "k_min") c.k_min = as_long();
      else if (key == "k_max") c.k_max = as_long();
      else if (key == "p_max") c.p_max = as_long();
      else if (key == "y_max") c.y_max = static_cast<unsigned long>(as_long());
      else if (key == "enumeration_bound") c.enumeration_bound = Int(value);
      else if (key == "validate") c.validate = (value == "true" || value == "1");
      else if (key == "workers") c.workers = static_cast<unsigned>(as_long());
      else throw Error(ErrorKind::ConfigInvalid, "unknown config key: " + key);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigInvalid,
                  "bad value for " + key + ": " + value);
    }
  };

  SurveyConfig cfg = std::move(base);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    detail::OrderedJson j;
    try {
      j = detail::OrderedJson::parse(text);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::ConfigInvalid, std::string("bad config JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (value.is_string()) apply(cfg, key, value.get<std::string>());
      else apply(cfg, key, value.dump());
    }
    return cfg;
  }
  std::istringstream lines(text);
  std::string line;
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(lines, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigInvalid, "expected key = value: " + line);
    apply(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace qf

#endif  // QF_SURVEY_HPP
