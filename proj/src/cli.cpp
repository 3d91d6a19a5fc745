#include "detline/cli.hpp"

#include "detline/config.hpp"
#include "detline/gelfand.hpp"
#include "detline/oracle.hpp"
#include "detline/validate.hpp"
#include "detline/zeromode.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>

namespace detline::cli {

namespace {

using nlohmann::json;

double round10(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(fmt::format("{:.10g}", v));
}

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string num(complex z) {
  if (z.imag() == 0.0) return num(z.real());
  return fmt::format("{:.10g}{:+.10g}i", z.real(), z.imag());
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      row.push_back({round10(m(i, k).real()), round10(m(i, k).imag())});
    rows.push_back(row);
  }
  return rows;
}

std::string potential_text(const std::vector<std::vector<std::string>>& rows) {
  if (rows.size() == 1) return rows[0][0];
  std::string s = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s += i ? "; " : "";
    for (std::size_t k = 0; k < rows[i].size(); ++k) s += (k ? ", " : "") + rows[i][k];
  }
  return s + "]";
}

struct OracleResult {
  int n = 0;
  double product = 0.0;
  double deviation = 0.0;
  std::string error;
};

OracleResult run_oracle(const Problem& p1, const Problem& p2, const BoundarySpec& bc, int n,
                        const DetRatioReport& report, std::vector<std::string>& warnings) {
  OracleResult o;
  o.n = n;
  try {
    ScanOptions options;
    const EigenvalueList l1 = eigenvalue_scan(p1, bc, n, options);
    const EigenvalueList l2 = eigenvalue_scan(p2, bc, n, options);
    const bool primed = report.path == "primed";
    for (std::size_t k = 0; k < l1.values.size(); ++k)
      if (l1.values[k] < 0 && !(primed && k == 0 && std::abs(l1.values[k]) < 1e-6))
        warnings.push_back(fmt::format("operator 1 has a negative eigenvalue {:.6g}", l1.values[k]));
    for (double v : l2.values)
      if (v < 0) warnings.push_back(fmt::format("operator 2 has a negative eigenvalue {:.6g}", v));
    o.product = truncated_product_ratio(l1, l2, n, primed);
    o.deviation = std::abs(o.product - report.ratio.real()) / std::abs(report.ratio);
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

int cmd_ratio(const std::string& path, const std::string& output, int oracle_n, std::ostream& out) {
  const ProblemConfig cfg = load_problem(path);
  const Problem p1 = cfg.problem1();
  const Problem p2 = cfg.problem2();
  const BoundarySpec& bc = *cfg.boundary;

  PrimedOptions primed;
  primed.designated_row = cfg.designated_row;
  DetRatioReport report;
  switch (cfg.extract_zero_mode) {
    case ZeroModeHint::Off: report = det_ratio(p1, p2, bc, cfg.controls); break;
    case ZeroModeHint::Force: report = det_ratio_primed(p1, p2, bc, cfg.controls, primed); break;
    case ZeroModeHint::Auto:
      if (detect_zero_mode(p1, bc, kZeroModeTolerance, cfg.controls).detected)
        report = det_ratio_primed(p1, p2, bc, cfg.controls, primed);
      else
        report = det_ratio(p1, p2, bc, cfg.controls);
      break;
  }

  const int n = oracle_n > 0 ? oracle_n : cfg.oracle_check;
  std::vector<std::string> warnings = report.warnings;
  OracleResult oracle;
  if (n > 0) oracle = run_oracle(p1, p2, bc, n, report, warnings);

  const bool zero_mode = report.path == "primed";
  if (output == "json") {
    json j;
    j["ratio_re"] = round10(report.ratio.real());
    j["ratio_im"] = round10(report.ratio.imag());
    j["zero_mode"] = zero_mode;
    j["path"] = report.path;
    j["numerator_re"] = round10(report.numerator.real());
    j["numerator_im"] = round10(report.numerator.imag());
    j["denominator_re"] = round10(report.denominator.real());
    j["denominator_im"] = round10(report.denominator.imag());
    j["self_adjoint"] = to_string(report.self_adjoint.status);
    j["steps_numerator"] = report.stats_numerator.steps;
    j["steps_denominator"] = report.stats_denominator.steps;
    j["warnings"] = warnings;
    if (zero_mode) {
      if (report.b_case) j["b_case"] = *report.b_case;
      else j["b_case"] = "system";
      j["b_constant_re"] = round10(report.b_constant.real());
      j["b_constant_im"] = round10(report.b_constant.imag());
      j["b_discrepancy"] = round10(report.b_discrepancy);
      j["norm_squared"] = round10(report.norm_squared);
      j["boundary_residual"] = round10(report.boundary_residual);
      j["zero_mode_residual"] = round10(report.zero_mode_residual);
    }
    if (n > 0) {
      j["oracle_n"] = n;
      if (oracle.error.empty()) {
        j["oracle_product"] = round10(oracle.product);
        j["oracle_deviation"] = round10(oracle.deviation);
      } else {
        j["oracle_error"] = oracle.error;
      }
    }
    out << j.dump(2) << "\n";
    return 0;
  }

  out << "det_ratio = " << (report.is_real() ? num(report.ratio.real()) : num(report.ratio))
      << "\n";
  out << "zero_mode = " << (zero_mode ? "true" : "false") << "\n";
  out << "path = " << report.path << "\n";
  out << "numerator = " << num(report.numerator) << "\n";
  out << "denominator = " << num(report.denominator) << "\n";
  out << "self_adjoint = " << to_string(report.self_adjoint.status) << "\n";
  if (zero_mode) {
    out << "b_case = " << (report.b_case ? std::to_string(*report.b_case) : "system") << "\n";
    out << "b_constant = " << num(report.b_constant) << "\n";
    out << "norm_squared = " << num(report.norm_squared) << "\n";
  }
  if (n > 0) {
    if (oracle.error.empty()) {
      out << fmt::format("oracle_product(N={}) = {}\n", n, num(oracle.product));
      out << "oracle_deviation = " << num(oracle.deviation) << "\n";
    } else {
      out << "oracle_error = " << oracle.error << "\n";
    }
  }
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return 0;
}

int cmd_eigenvalues(const std::string& path, int count, int which, const std::string& output,
                    std::ostream& out) {
  const ProblemConfig cfg = load_problem(path);
  const Problem p = which == 2 ? cfg.problem2() : cfg.problem1();
  ScanOptions options;
  options.controls = cfg.controls;
  const EigenvalueList list = eigenvalue_scan(p, *cfg.boundary, count, options);
  if (output == "json") {
    json j;
    j["operator"] = which;
    json vals = json::array(), res = json::array(), even = json::array();
    for (double v : list.values) vals.push_back(round10(v));
    for (double v : list.residuals) res.push_back(round10(v));
    for (double v : list.suspected_even_roots) even.push_back(round10(v));
    j["eigenvalues"] = vals;
    j["residuals"] = res;
    j["suspected_even_roots"] = even;
    out << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t k = 0; k < list.values.size(); ++k)
    out << fmt::format("lambda_{} = {}\n", k + 1, num(list.values[k]));
  for (double v : list.suspected_even_roots)
    out << fmt::format("warning: suspected even-multiplicity root near {}\n", num(v));
  return 0;
}

int cmd_validate(const std::string& output, std::ostream& out) {
  const auto rows = run_regression_suite();
  const bool all = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
  if (output == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j{{"name", r.name},
             {"computed", round10(r.computed)},
             {"expected", round10(r.expected)},
             {"tolerance", r.tolerance},
             {"relative", r.relative},
             {"pass", r.pass}};
      if (!r.error.empty()) j["error"] = r.error;
      arr.push_back(j);
    }
    out << json{{"rows", arr}, {"all_pass", all}}.dump(2) << "\n";
  } else {
    out << fmt::format("{:<6}{:<32}{:>18}{:>18}{:>10}\n", "", "case", "computed", "expected",
                       "tol");
    for (const auto& r : rows) {
      out << fmt::format("{:<6}{:<32}{:>18}{:>18}{:>10}\n", r.pass ? "PASS" : "FAIL", r.name,
                         num(r.computed), num(r.expected),
                         fmt::format("{:.0e}{}", r.tolerance, r.relative ? "r" : ""));
      if (!r.error.empty()) out << "      error: " << r.error << "\n";
    }
  }
  return all ? 0 : 1;
}

int cmd_describe(const std::string& path, const std::string& output, std::ostream& out) {
  const ProblemConfig cfg = load_problem(path);
  const BoundarySpec& bc = *cfg.boundary;
  const SelfAdjointReport sa = check_self_adjoint(bc);
  const Problem p1 = cfg.problem1();
  const Problem p2 = cfg.problem2();
  if (output == "json") {
    json j;
    j["a"] = cfg.a;
    j["b"] = cfg.b;
    j["r"] = cfg.r;
    j["potential1"] = cfg.potential1;
    j["potential2"] = cfg.potential2;
    json params = json::object();
    for (const auto& [k, v] : cfg.parameters) params[k] = {round10(v.real()), round10(v.imag())};
    j["parameters"] = params;
    j["boundary"] = {{"kind", to_string(bc.kind())}, {"tag", bc.tag()},
                     {"M", matrix_json(bc.M())}, {"N", matrix_json(bc.N())},
                     {"separated", bc.is_separated()}};
    json s{{"status", to_string(sa.status)}, {"pivot_case", sa.pivot_case}};
    if (!sa.violated.empty()) s["violated"] = sa.violated;
    if (sa.dets_equal) s["dets_equal"] = *sa.dets_equal;
    j["self_adjoint"] = s;
    j["real_potentials"] = p1.is_real() && p2.is_real();
    j["solver"] = {{"rtol", cfg.controls.rtol}, {"atol", cfg.controls.atol},
                   {"max_step", cfg.controls.max_step}};
    j["task"] = {{"extract_zero_mode", to_string(cfg.extract_zero_mode)},
                 {"oracle_check", cfg.oracle_check}};
    out << j.dump(2) << "\n";
    return 0;
  }
  out << fmt::format("interval = [{}, {}]\n", num(cfg.a), num(cfg.b));
  out << "r = " << cfg.r << "\n";
  out << "potential1 = " << potential_text(cfg.potential1) << "\n";
  out << "potential2 = " << potential_text(cfg.potential2) << "\n";
  for (const auto& [k, v] : cfg.parameters) out << "parameter " << k << " = " << num(v) << "\n";
  out << "boundary = " << bc.tag() << (bc.is_separated() ? " (separated)" : " (non-separated)")
      << "\n";
  for (const auto& [name, m] : {std::pair{"M", &bc.M()}, std::pair{"N", &bc.N()}}) {
    out << name << " =\n";
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      out << " ";
      for (Eigen::Index k = 0; k < m->cols(); ++k) out << " " << num((*m)(i, k));
      out << "\n";
    }
  }
  out << "self_adjoint = " << to_string(sa.status);
  if (sa.pivot_case) out << " (pivot case " << sa.pivot_case << ")";
  out << "\n";
  if (sa.dets_equal)
    out << "det M = " << num(sa.det_m) << ", det N = " << num(sa.det_n)
        << (*sa.dets_equal ? " (equal)" : " (different)") << "\n";
  out << "real potentials = " << (p1.is_real() && p2.is_real() ? "yes" : "no") << "\n";
  out << "extract_zero_mode = " << to_string(cfg.extract_zero_mode) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ratios of functional determinants of -d^2/dx^2 + Q(x)", "detline"};
  app.require_subcommand(1);
  std::string problem, output = "text";
  int oracle = 0, count = 0, which = 1;

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", output, "text or json")->check(CLI::IsMember({"text", "json"}));
  };
  auto* ratio = app.add_subcommand("ratio", "det L1 / det L2, or det' L1 / det L2 with a zero mode");
  ratio->add_option("--problem", problem, "problem file (JSON)")->required();
  ratio->add_option("--oracle", oracle, "also compute the truncated eigenvalue product")
      ->check(CLI::PositiveNumber);
  add_output(ratio);
  auto* eig = app.add_subcommand("eigenvalues", "lowest eigenvalues by root bracketing");
  eig->add_option("--problem", problem, "problem file (JSON)")->required();
  eig->add_option("--count", count, "number of eigenvalues")->required()->check(CLI::PositiveNumber);
  eig->add_option("--operator", which, "1 or 2")->check(CLI::IsMember({1, 2}));
  add_output(eig);
  auto* val = app.add_subcommand("validate", "run the built-in regression suite");
  add_output(val);
  auto* desc = app.add_subcommand("describe", "show the parsed problem and boundary analysis");
  desc->add_option("--problem", problem, "problem file (JSON)")->required();
  add_output(desc);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*ratio) return cmd_ratio(problem, output, oracle, out);
    if (*eig) return cmd_eigenvalues(problem, count, which, output, out);
    if (*val) return cmd_validate(output, out);
    if (*desc) return cmd_describe(problem, output, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const expr::ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const expr::EvalError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace detline::cli
