#ifndef QF_CLI_HPP
#define QF_CLI_HPP

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qf/diophantine.hpp"
#include "qf/survey.hpp"

namespace qf {

namespace detail {

inline OrderedJson form_to_json(const QForm& f) {
  return OrderedJson::array({f.a.get_str(), f.b.get_str(), f.c.get_str()});
}

inline OrderedJson certificate_to_json(const Certificate& cert) {
  OrderedJson j;
  j["k"] = cert.instance.k.get_str();
  j["p"] = cert.instance.p.get_str();
  j["n"] = cert.instance.n;
  j["N"] = cert.instance.N.get_str();
  j["d"] = cert.instance.d.get_str();
  j["m"] = cert.instance.m.get_str();
  j["D"] = cert.instance.discriminant.get_str();
  if (cert.instance.p_probable_prime) j["probable_prime"] = true;
  j["cond_i"] = cert.cond_i;
  OrderedJson jii;
  jii["ok"] = cert.cond_ii.ok;
  if (cert.cond_ii.witness) {
    jii["t"] = cert.cond_ii.witness->first.get_str();
    jii["q"] = cert.cond_ii.witness->second.get_str();
  }
  j["cond_ii"] = jii;
  OrderedJson jiii;
  jiii["ok"] = cert.cond_iii.ok;
  if (cert.cond_iii.witness) {
    jiii["k_prime"] = cert.cond_iii.witness->get_str();
    jiii["extra_branch"] = cert.cond_iii.extra_branch;
  }
  j["cond_iii"] = jiii;
  j["certified"] = cert.certified;
  j["constructed_class"] = form_to_json(cert.constructed_class);
  if (cert.claimed_order) j["claimed_order"] = cert.claimed_order->get_ui();
  if (cert.oracle_order) j["oracle_order"] = cert.oracle_order->get_ui();
  if (cert.class_number) j["h"] = cert.class_number->get_ui();
  return j;
}

inline OrderedJson exception_report_to_json(const ExceptionReport& rep) {
  OrderedJson j;
  j["D1"] = rep.D1.get_str();
  j["D2"] = rep.D2.get_str();
  j["p"] = rep.p.get_str();
  j["lambda_sq"] = rep.lambda_sq;
  j["in_S"] = rep.in_S;
  if (rep.in_F) {
    j["in_F"] = OrderedJson{{"l", rep.in_F->l}, {"eps", rep.in_F->eps}};
  } else {
    j["in_F"] = nullptr;
  }
  if (rep.in_G) j["in_G"] = *rep.in_G;
  else j["in_G"] = nullptr;
  if (rep.in_H) {
    j["in_H"] = OrderedJson{{"r", rep.in_H->r}, {"s", rep.in_H->s.get_str()}};
  } else {
    j["in_H"] = nullptr;
  }
  return j;
}

inline Int parse_int(const std::string& s, const char* what) {
  try {
    return Int(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigInvalid,
                std::string(what) + " is not an integer: " + s);
  }
}

inline unsigned default_workers() {
  if (const char* env = std::getenv("QF_WORKERS")) {
    long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc >= 1 ? hc : 1;
}

}  // namespace detail

/// Parses and runs one subcommand. Exit codes: 0 success, 1 domain error
/// (machine-readable kind on the error stream), 2 usage error.
inline int cli_dispatch(std::vector<std::string> args, std::ostream& out,
                        std::ostream& err) {
  CLI::App app{"Binary quadratic form class groups and ideal-class order "
               "certificates for Q(sqrt(k^2 - p^n))"};
  app.name("qf");
  app.require_subcommand(1);

  // certify
  long c_k = 0, c_p = 0, c_n = 0;
  bool c_validate = false;
  std::string c_bound = kDefaultEnumerationBound.get_str();
  CLI::App* certify_cmd =
      app.add_subcommand("certify", "Check the order-n conditions for (k, p, n)");
  certify_cmd->add_option("--k", c_k, "k >= 1, coprime to p")->required();
  certify_cmd->add_option("--p", c_p, "odd prime p")->required();
  certify_cmd->add_option("--n", c_n, "odd n >= 3")->required();
  certify_cmd->add_flag("--validate", c_validate,
                        "cross-check the claimed order against the form oracle");
  certify_cmd->add_option("--enum-bound", c_bound, "|D| cap for the oracle");

  // classgroup
  long g_d = 0, g_disc = 0;
  std::string g_bound = kDefaultEnumerationBound.get_str();
  CLI::App* classgroup_cmd =
      app.add_subcommand("classgroup", "Enumerate the reduced forms of a discriminant");
  CLI::Option* opt_d =
      classgroup_cmd->add_option("--d", g_d, "squarefree d > 0 for Q(sqrt(-d))");
  CLI::Option* opt_disc =
      classgroup_cmd->add_option("--disc", g_disc, "fundamental discriminant < 0");
  opt_d->excludes(opt_disc);
  classgroup_cmd->add_option("--bound", g_bound, "|D| enumeration cap");

  // order
  long o_k = 0, o_p = 0, o_n = 0;
  std::string o_bound = kDefaultEnumerationBound.get_str();
  CLI::App* order_cmd =
      app.add_subcommand("order", "Order of the ideal class above p in K_{k,p,n}");
  order_cmd->add_option("--k", o_k)->required();
  order_cmd->add_option("--p", o_p)->required();
  order_cmd->add_option("--n", o_n)->required();
  order_cmd->add_option("--enum-bound", o_bound, "|D| cap for enumeration");

  // solve
  long s_d = 0, s_k = 0, s_p = 0;
  unsigned long s_ymax = 40;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "All solutions of d x^2 + k^2 = p^y with y <= ymax");
  solve_cmd->add_option("--d", s_d)->required();
  solve_cmd->add_option("--k", s_k)->required();
  solve_cmd->add_option("--p", s_p)->required();
  solve_cmd->add_option("--ymax", s_ymax, "exponent bound (default 40)");

  // exceptional
  long e_d1 = 0, e_d2 = 0, e_p = 0;
  int e_lambda_sq = 1;
  CLI::App* exceptional_cmd = app.add_subcommand(
      "exceptional", "Membership of (D1, D2, p) in the exceptional sets");
  exceptional_cmd->add_option("--d1", e_d1)->required();
  exceptional_cmd->add_option("--d2", e_d2)->required();
  exceptional_cmd->add_option("--p", e_p)->required();
  exceptional_cmd->add_option("--lambda-sq", e_lambda_sq, "lambda^2 in {1, 2, 4}")
      ->check(CLI::IsMember({1, 2, 4}));

  // survey
  std::string v_config, v_out, v_format = "json", v_bound;
  long v_n = 0, v_kmin = 0, v_kmax = 0, v_pmax = 0;
  unsigned long v_ymax = 0;
  unsigned v_workers = 0;
  bool v_validate = false;
  CLI::App* survey_cmd =
      app.add_subcommand("survey", "Certify a (k, p) grid and emit a report");
  survey_cmd->add_option("--config", v_config, "config file (JSON or key = value)");
  CLI::Option* so_n = survey_cmd->add_option("--n", v_n, "odd n >= 3");
  CLI::Option* so_kmin = survey_cmd->add_option("--kmin", v_kmin);
  CLI::Option* so_kmax = survey_cmd->add_option("--kmax", v_kmax);
  CLI::Option* so_pmax = survey_cmd->add_option("--pmax", v_pmax);
  CLI::Option* so_ymax = survey_cmd->add_option("--ymax", v_ymax);
  CLI::Option* so_bound =
      survey_cmd->add_option("--enum-bound", v_bound, "|D| cap for validation");
  CLI::Option* so_validate =
      survey_cmd->add_flag("--validate", v_validate, "cross-check every certified row");
  CLI::Option* so_workers =
      survey_cmd->add_option("--workers", v_workers, "thread count (QF_WORKERS overrides the default)");
  survey_cmd->add_option("--out", v_out, "write the report here instead of stdout");
  survey_cmd->add_option("--format", v_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (certify_cmd->parsed()) {
      Certificate cert = certify(Int(c_k), Int(c_p), c_n);
      if (c_validate) cert = cross_validate(cert, detail::parse_int(c_bound, "--enum-bound"));
      out << detail::certificate_to_json(cert).dump(2) << "\n";
      return 0;
    }
    if (classgroup_cmd->parsed()) {
      if (opt_d->count() == 0 && opt_disc->count() == 0)
        throw Error(ErrorKind::ConfigInvalid, "classgroup needs --d or --disc");
      Discriminant D = opt_d->count() > 0 ? fundamental_discriminant_for(Int(g_d))
                                          : Discriminant::make(Int(g_disc));
      ClassGroup G = enumerate_class_group(D, detail::parse_int(g_bound, "--bound"));
      detail::OrderedJson j;
      j["discriminant"] = D.value().get_str();
      j["h"] = G.h();
      j["forms"] = detail::OrderedJson::array();
      for (const QForm& f : G.reduced_forms) j["forms"].push_back(detail::form_to_json(f));
      out << j.dump(2) << "\n";
      return 0;
    }
    if (order_cmd->parsed()) {
      FieldInstance inst = build_instance(Int(o_k), Int(o_p), o_n);
      QForm f = ideal_above_p(inst);
      OracleCheck check = oracle_order_of(inst, f, detail::parse_int(o_bound, "--enum-bound"));
      detail::OrderedJson j;
      j["k"] = o_k;
      j["p"] = o_p;
      j["n"] = o_n;
      j["d"] = inst.d.get_str();
      j["D"] = inst.discriminant.get_str();
      j["form"] = detail::form_to_json(f);
      j["order"] = check.order.get_ui();
      if (check.class_number) j["h"] = check.class_number->get_ui();
      out << j.dump(2) << "\n";
      return 0;
    }
    if (solve_cmd->parsed()) {
      if (s_d < 2 || s_k < 1 || s_ymax < 1)
        throw Error(ErrorKind::ConfigInvalid, "solve needs d >= 2, k >= 1, ymax >= 1");
      if (s_p < 3 || s_p % 2 == 0 || !is_prime(Int(s_p)))
        throw Error(ErrorKind::InvalidP, "p must be an odd prime");
      std::vector<DioSolution> sols = solve_eq1(Int(s_d), Int(s_k), Int(s_p), s_ymax);
      detail::OrderedJson j;
      j["d"] = s_d;
      j["k"] = s_k;
      j["p"] = s_p;
      j["y_max"] = s_ymax;
      j["solutions"] = detail::OrderedJson::array();
      for (const DioSolution& s : sols)
        j["solutions"].push_back(
            detail::OrderedJson{{"x", s.x.get_str()}, {"y", s.y}});
      out << j.dump(2) << "\n";
      return 0;
    }
    if (exceptional_cmd->parsed()) {
      ExceptionReport rep =
          classify_exceptional(Int(e_d1), Int(e_d2), Int(e_p), e_lambda_sq);
      out << detail::exception_report_to_json(rep).dump(2) << "\n";
      return 0;
    }
    if (survey_cmd->parsed()) {
      SurveyConfig cfg;
      cfg.workers = detail::default_workers();
      if (!v_config.empty()) cfg = parse_config_file(v_config, cfg);
      if (so_n->count()) cfg.n = v_n;
      if (so_kmin->count()) cfg.k_min = v_kmin;
      if (so_kmax->count()) cfg.k_max = v_kmax;
      if (so_pmax->count()) cfg.p_max = v_pmax;
      if (so_ymax->count()) cfg.y_max = v_ymax;
      if (so_bound->count()) cfg.enumeration_bound = detail::parse_int(v_bound, "--enum-bound");
      if (so_validate->count()) cfg.validate = v_validate;
      if (so_workers->count()) cfg.workers = v_workers;
      SurveyReport report = run_survey(cfg);
      ReportFormat format = report_format_from_string(v_format);
      if (v_out.empty()) emit_report(report, format, out);
      else emit_report(report, format, v_out);
      return 0;
    }
    err << "usage error: no subcommand\n";
    return 2;
  } catch (const Error& e) {
    detail::OrderedJson j;
    j["error"] = e.kind_name();
    j["message"] = e.what();
    err << j.dump() << "\n";
    return 1;
  }
}

}  // namespace qf

#endif  // QF_CLI_HPP
