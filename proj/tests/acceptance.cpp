// Acceptance checks; prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include "detline/boundary.hpp"
#include "detline/cli.hpp"
#include "detline/gelfand.hpp"
#include "detline/oracle.hpp"
#include "detline/validate.hpp"
#include "detline/zeromode.hpp"

#include "random_specs.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace detline;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

Problem scalar(const std::string& r, ParamMap params = {}) {
  return Problem::scalar(0, 1, r, std::move(params));
}

Problem twisted_problem(double mu, double l) {
  const auto t = twisted_potential_text();
  return Problem(-l / 2, l / 2, Potential::matrix({{t[0][0], t[0][1]}, {t[1][0], t[1][1]}}),
                 {{"mu", mu}});
}

double airy_root() { return eigenvalue_scan(scalar("x"), dirichlet(), 1).values.at(0); }

Outcome criterion1() {
  const double ratio = det_ratio(scalar("x"), scalar("0"), dirichlet()).ratio.real();
  const double ref = airy_dirichlet_reference();
  const bool ok = std::abs(ratio - 1.085) <= 1e-3 && std::abs(ratio - ref) <= 1e-8;
  return {ok, fmt::format("ratio={:.10g} airy_oracle={:.10g} |ratio-1.085|={:.2e}", ratio, ref,
                          std::abs(ratio - 1.085))};
}

Outcome criterion2() {
  const double x0 = airy_root();
  const DetRatioReport rep =
      det_ratio_primed(scalar("x - x0", {{"x0", x0}}), scalar("0"), dirichlet());
  const double v = rep.ratio.real();
  const bool ok = std::abs(x0 - 10.3685) <= 1e-3 && std::abs(v - 0.050666) <= 1e-4 &&
                  rep.b_case == 2;
  return {ok, fmt::format("x0={:.10g} primed={:.10g} b_case={}", x0, v, rep.b_case.value_or(0))};
}

Outcome criterion3() {
  const double x0 = airy_root();
  const auto list = eigenvalue_scan(scalar("x - x0", {{"x0", x0}}), dirichlet(), 5);
  double worst = 0.0;
  std::string parts;
  for (int n = 1; n <= 5; ++n) {
    const double dev =
        std::abs(list.values[n - 1] + x0 - (n * n * pi * pi + 0.5)) / (n * n * pi * pi);
    worst = std::max(worst, dev);
    parts += fmt::format(" n{}={:.2e}", n, dev);
  }
  return {worst <= 1e-4, "relative deviations" + parts};
}

Outcome criterion4() {
  const double mu = 0.3, l = 4.0;
  const Problem ref(-l / 2, l / 2, Potential::matrix({{"1", "0"}, {"0", "1"}}));
  const DetRatioReport rep = det_ratio_primed(twisted_problem(mu, l), ref, twisted(mu, l));
  const double expect = twisted_f10_reference(mu, l);
  const double rel = std::abs(rep.numerator - expect) / expect;
  return {rel <= 1e-6, fmt::format("f10={:.10g}{:+.2e}i closed_form={:.10g} rel={:.2e}",
                                   rep.numerator.real(), rep.numerator.imag(), expect, rel)};
}

Outcome criterion5() {
  const double mu = 0.25, l = 2.0;
  Controls keep;
  keep.keep_trajectory = true;
  const FundamentalSolution full = propagate_fundamental(twisted_problem(mu, l), 0.0, keep);
  const CMatrix eye = CMatrix::Identity(4, 4);
  const bool initial_exact = (full.trajectory.front().h - eye).cwiseAbs().maxCoeff() == 0.0;
  const double analytic_initial =
      (analytic_fundamental_twisted(-l / 2, mu, l) - eye).cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double x = -l / 2 + l * k / 10.0;
    const auto t = twisted_potential_text();
    const Problem p(-l / 2, x, Potential::matrix({{t[0][0], t[0][1]}, {t[1][0], t[1][1]}}),
                    {{"mu", mu}});
    const CMatrix numeric = propagate_fundamental(p, 0.0).end;
    worst = std::max(worst,
                     (numeric - analytic_fundamental_twisted(x, mu, l)).cwiseAbs().maxCoeff());
  }
  const bool ok = initial_exact && analytic_initial <= 1e-14 && worst <= 1e-8;
  return {ok, fmt::format("max_entry_error={:.2e} H(a)=I exact={} analytic(-l/2)-I={:.1e}", worst,
                          initial_exact, analytic_initial)};
}

Outcome criterion6() {
  const double ratio = det_ratio(scalar("x"), scalar("0"), dirichlet()).ratio.real();
  const double p25 = truncated_product_ratio(scalar("x"), scalar("0"), dirichlet(), 25, false);
  const double p200 = truncated_product_ratio(scalar("x"), scalar("0"), dirichlet(), 200, false);
  const double d25 = std::abs(p25 - ratio), d200 = std::abs(p200 - ratio);
  return {d200 <= 0.01 * ratio && d200 < d25,
          fmt::format("gelfand={:.10g} N25={:.10g} N200={:.10g} dev25={:.2e} dev200={:.2e}", ratio,
                      p25, p200, d25, d200)};
}

Outcome criterion7() {
  const double v =
      det_ratio_primed(scalar("-pi^2"), scalar("0"), dirichlet()).ratio.real();
  const double exact = 1.0 / (2.0 * pi * pi);
  const double prod = truncated_product_ratio(scalar("-pi^2"), scalar("0"), dirichlet(), 500, true);
  const bool ok = std::abs(v - exact) <= 1e-8 && std::abs(prod - exact) <= 0.005 * exact;
  return {ok, fmt::format("primed={:.12g} exact={:.12g} product(N=500)={:.10g} rel={:.2e}", v,
                          exact, prod, std::abs(prod - exact) / exact)};
}

Outcome criterion8() {
  const double s05 = std::sinh(0.5), s1 = std::sinh(1.0);
  const double primed = det_ratio_primed(scalar("0"), scalar("1"), periodic()).ratio.real();
  const double plain = det_ratio(scalar("1"), scalar("4"), periodic()).ratio.real();
  const double e1 = 1.0 / (4 * s05 * s05), e2 = s05 * s05 / (s1 * s1);
  const bool ok = std::abs(primed - e1) <= 1e-8 && std::abs(plain - e2) <= 1e-8;
  return {ok, fmt::format("primed={:.12g} (exp {:.12g}) ratio={:.12g} (exp {:.12g})", primed, e1,
                          plain, e2)};
}

Outcome criterion9() {
  std::mt19937_64 rng(20261018);
  // det H drift
  double drift = 0.0;
  for (int k = 0; k < 100; ++k) {
    const test::RandomProblem rp = test::random_problem(rng, 1 + k % 3);
    drift = std::max(drift, propagate_fundamental(rp.problem, rp.lambda).max_det_drift);
  }
  // identity between the reduced boundary form and the characteristic
  double detlow = 0.0;
  for (int k = 0; k < 60; ++k) {
    const test::RandomProblem rp = test::random_problem(rng, 1);
    const BoundarySpec bc = test::random_scalar_spec(rng, k % 3);
    const CMatrix h = propagate_fundamental(rp.problem, rp.lambda).end;
    detlow = std::max(detlow, std::abs(reduced_boundary_form(bc, normalized_solution(bc, h)) -
                                       characteristic(bc, h)));
  }
  // all applicable B cases agree
  double spread = 0.0;
  int instances = 0, multi = 0;
  for (int k = 0; k < 24; ++k) {
    const auto zm = test::random_zero_mode_instance(rng);
    if (!zm) continue;
    const ZeroModeData data = normalized_zero_mode(zm->problem, zm->bc);
    const BConstant b = b_constant(zm->bc, data);
    spread = std::max(spread, b.discrepancy);
    ++instances;
    if (b.cases.size() > 1) ++multi;
  }
  // trivial ratio
  double trivial = 0.0;
  const Problem p = scalar("2 + sin(3*x)");
  for (const BoundarySpec& bc : {dirichlet(), neumann(), robin(1, 2, 3, 4), periodic()})
    trivial = std::max(trivial, std::abs(det_ratio(p, p, bc).ratio - 1.0));

  const bool ok = drift <= 1e-10 && detlow <= 1e-10 && spread <= 1e-8 && instances >= 20 &&
                  multi >= 10 && trivial <= 1e-12;
  return {ok, fmt::format("det_drift={:.2e} detlow={:.2e} B_spread={:.2e} ({} instances, {} "
                          "multi-case) trivial={:.1e}",
                          drift, detlow, spread, instances, multi, trivial)};
}

Outcome criterion10() {
  bool named = true;
  for (const BoundarySpec& bc : {dirichlet(), neumann(), robin(1, 2, 3, 4), robin(2, -1, 0.5, 3),
                                 periodic()})
    named = named && check_self_adjoint(bc).status == SelfAdjointStatus::Pass;
  const BoundarySpec bad(CMatrix::Identity(2, 2), -2.0 * CMatrix::Identity(2, 2));
  const bool fails = check_self_adjoint(bad).status == SelfAdjointStatus::Fail;

  const auto path = std::filesystem::temp_directory_path() / "detline_acceptance_bad_bc.json";
  std::ofstream(path) << R"({"a": 0, "b": 1, "r": 1, "potential1": "0", "potential2": "1",
    "boundary": {"kind": "custom", "M": [[[1,0],[0,0]],[[0,0],[1,0]]],
                 "N": [[[-2,0],[0,0]],[[0,0],[-2,0]]]},
    "task": {"extract_zero_mode": "force"}})";
  std::ostringstream out, err;
  const int code = cli::run({"ratio", "--problem", path.string()}, out, err);
  std::filesystem::remove(path);
  return {named && fails && code == 1,
          fmt::format("named_pass={} I/-2I_fails={} cli_exit={}", named, fails, code)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"airy_dirichlet_ratio", criterion1},
      {"airy_zero_mode_primed", criterion2},
      {"airy_eigenvalue_asymptotics", criterion3},
      {"twisted_two_component_f10", criterion4},
      {"twisted_analytic_fundamental", criterion5},
      {"oracle_product_no_zero_mode", criterion6},
      {"oracle_product_zero_mode", criterion7},
      {"periodic_closed_forms", criterion8},
      {"property_suite", criterion9},
      {"self_adjointness_gate", criterion10},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << k + 1 << " " << criteria[k].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
