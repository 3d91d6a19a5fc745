#include "detline/errors.hpp"
#include "detline/oracle.hpp"
#include "detline/zeromode.hpp"

#include "doctest.h"
#include "random_specs.hpp"

#include <cmath>
#include <numbers>

using namespace detline;
using std::numbers::pi;

namespace {

Problem scalar(const std::string& r, ParamMap params = {}) {
  return Problem::scalar(0, 1, r, std::move(params));
}

Problem twisted_problem(double mu, double l) {
  const auto t = twisted_potential_text();
  return Problem(-l / 2, l / 2, Potential::matrix({{t[0][0], t[0][1]}, {t[1][0], t[1][1]}}),
                 {{"mu", mu}});
}

Problem robin_zero_mode_problem(const BoundarySpec& bc) {
  ScanOptions options;
  options.use_runge_kutta = true;
  const double lam = eigenvalue_scan(scalar("x"), bc, 1, options).values.at(0);
  return scalar("x - lam", {{"lam", lam}});
}

bool has_case(const BConstant& b, int c) {
  for (const auto& entry : b.cases)
    if (entry.first == c) return true;
  return false;
}

}  // namespace

TEST_CASE("zero mode detection") {
  CHECK(detect_zero_mode(scalar("-pi^2"), dirichlet()).detected);
  CHECK(detect_zero_mode(scalar("-4*pi^2"), dirichlet()).detected);
  CHECK(detect_zero_mode(scalar("0"), neumann()).detected);
  CHECK(detect_zero_mode(scalar("0"), periodic()).detected);
  CHECK(detect_zero_mode(scalar("-4*pi^2"), periodic()).detected);
  CHECK_FALSE(detect_zero_mode(scalar("1"), periodic()).detected);
  CHECK_FALSE(detect_zero_mode(scalar("0"), dirichlet()).detected);
  CHECK_FALSE(detect_zero_mode(scalar("-pi^2 + 1e-3"), dirichlet()).detected);
  const ZeroModeCheck near = detect_zero_mode(scalar("-pi^2 + 1e-3"), dirichlet(), 1e-2);
  CHECK(near.detected);
  CHECK(near.residual > 1e-8);
}

TEST_CASE("Dirichlet zero mode") {
  const ZeroModeData zm = normalized_zero_mode(scalar("-pi^2"), dirichlet());
  CHECK(zm.initial(0) == complex(0.0));
  CHECK(zm.initial(1) == complex(1.0));
  CHECK_FALSE(zm.rows_swapped);
  CHECK(std::abs(zm.norm_squared - 1.0 / (2 * pi * pi)) < 1e-10);
  CHECK(std::abs(zm.u_b(0)) < 1e-9);
  CHECK(std::abs(zm.v_b(0) + 1.0) < 1e-9);
  const BConstant b = b_constant(dirichlet(), zm);
  CHECK(b.table_case == 2);
  CHECK(std::abs(b.value - 1.0 / std::conj(zm.v_b(0))) < 1e-12);

  const DetRatioReport rep = det_ratio_primed(scalar("-pi^2"), scalar("0"), dirichlet());
  CHECK(std::abs(rep.ratio - 1.0 / (2 * pi * pi)) < 1e-9);
  CHECK(rep.path == "primed");
  CHECK(rep.b_case == 2);
}

TEST_CASE("periodic constant zero mode") {
  const ZeroModeData zm = normalized_zero_mode(scalar("0"), periodic());
  for (const StateSample& s : zm.trajectory.samples) {
    CHECK(std::abs(s.state(0) - zm.initial(0)) < 1e-12);
    CHECK(std::abs(s.state(1)) < 1e-12);
  }
  const BConstant b = b_constant(periodic(), zm);
  CHECK(has_case(b, 3));
  CHECK(has_case(b, 5));
  CHECK(b.table_case == 3);
  CHECK(b.discrepancy < 1e-12);

  const double s05 = std::sinh(0.5);
  const DetRatioReport rep = det_ratio_primed(scalar("0"), scalar("1"), periodic());
  CHECK(std::abs(rep.ratio - 1.0 / (4 * s05 * s05)) < 1e-9);
}

TEST_CASE("Robin zero mode uses the first table case") {
  const BoundarySpec bc = robin(1, 2, 3, 4);
  const Problem p = robin_zero_mode_problem(bc);
  const ZeroModeData zm = normalized_zero_mode(p, bc);
  CHECK(zm.boundary_residual < 1e-8);
  const BConstant b = b_constant(bc, zm);
  CHECK(b.table_case == 1);
  CHECK(std::abs(b.value + 4.0 / std::conj(zm.u_b(0))) < 1e-12 * std::abs(b.value));
  CHECK(b.discrepancy < 1e-8);
}

TEST_CASE("pivot formula reproduces every applicable table case") {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int k = 0; k < 12; ++k) {
    const auto inst = test::random_zero_mode_instance(rng);
    if (!inst) continue;
    const ZeroModeData zm = normalized_zero_mode(inst->problem, inst->bc);
    const BConstant b = b_constant(inst->bc, zm);
    for (const auto& [c, v] : b.cases) {
      const complex g = b_from_pivot(*zm.spec, zm, pivot_columns_for_case(c));
      CHECK_MESSAGE(std::abs(g - v) < 1e-8 * std::abs(v), "case ", c);
      ++checked;
    }
  }
  CHECK(checked >= 12);
}

TEST_CASE("B is the derivative of the characteristic along the mode") {
  std::mt19937_64 rng(32);
  int checked = 0;
  for (int k = 0; k < 8; ++k) {
    const auto inst = test::random_zero_mode_instance(rng);
    if (!inst) continue;
    const ZeroModeData zm = normalized_zero_mode(inst->problem, inst->bc);
    const BoundarySpec& spec = *zm.spec;
    const complex b = b_constant(inst->bc, zm).value;
    auto ratio_at = [&](double lambda) {
      const CMatrix h = propagate_fundamental(inst->problem, lambda).end;
      const Trajectory u = propagate_combination(inst->problem, lambda, zm.initial);
      return characteristic(spec, h) / (lambda * inner_product(inst->problem, zm.trajectory, u));
    };
    const complex g1 = ratio_at(1e-3), g2 = ratio_at(1e-4);
    const complex extrapolated = g2 + (g2 - g1) / 9.0;
    CHECK(std::abs(g2 - b) < 1e-2 * std::abs(b));
    CHECK(std::abs(extrapolated - b) < 1e-5 * std::abs(b));
    ++checked;
  }
  CHECK(checked >= 6);
}

TEST_CASE("twisted zero mode in closed form") {
  const double mu = 0.3, l = 4.0;
  const double nu = std::sqrt(2.0 * (1.0 - 3.0 * mu * mu));
  const double s = std::sinh(l * nu / 2);
  const complex c = -4.0 * l * (1 - mu * mu) * s * s / (nu * nu) * std::polar(1.0, l * mu / 2);
  const ZeroModeData zm = normalized_zero_mode(twisted_problem(mu, l), twisted(mu, l));
  REQUIRE(zm.trajectory.samples.size() > 4);
  for (const StateSample& p : zm.trajectory.samples) {
    CHECK(std::abs(p.state(0) - c * std::polar(1.0, mu * p.x)) < 1e-7 * std::abs(c));
    CHECK(std::abs(p.state(1) + c * std::polar(1.0, -mu * p.x)) < 1e-7 * std::abs(c));
  }
  CHECK(std::abs(zm.norm_squared - 2 * l * std::norm(c)) < 1e-7 * zm.norm_squared);
  CHECK(zm.designated_row == 3);
}

TEST_CASE("scalar zero mode embedded in a diagonal system") {
  const Problem diag(0, 1, Potential::matrix({{"1", "0"}, {"0", "-pi^2"}}));
  const Problem free(0, 1, Potential::matrix({{"0", "0"}, {"0", "0"}}));
  const DetRatioReport rep = det_ratio_primed(diag, free, dirichlet(2));
  CHECK(rep.b_system);
  CHECK_FALSE(rep.b_case.has_value());
  CHECK(std::abs(rep.ratio - std::sinh(1.0) / (2 * pi * pi)) < 1e-9);

  PrimedOptions other;
  other.designated_row = 2;
  CHECK_THROWS_AS(det_ratio_primed(diag, free, dirichlet(2), {}, other), ComputationError);
}

TEST_CASE("first row satisfied identically falls back to the swapped rows") {
  const BoundarySpec bc(
      [] { CMatrix m(2, 2); m << 0, 0, 1, 0; return m; }(),
      [] { CMatrix n(2, 2); n << 1, 0, 0, 0; return n; }());
  const DetRatioReport swapped = det_ratio_primed(scalar("-pi^2"), scalar("0"), bc);
  const DetRatioReport plain = det_ratio_primed(scalar("-pi^2"), scalar("0"), dirichlet());
  CHECK(std::abs(swapped.ratio - plain.ratio) < 1e-9);
}

TEST_CASE("primed path refusals") {
  const BoundarySpec bad(CMatrix::Identity(2, 2), -2.0 * CMatrix::Identity(2, 2));
  CHECK_THROWS_AS(det_ratio_primed(scalar("0"), scalar("1"), bad), SelfAdjointnessError);
  CHECK_THROWS_AS(det_ratio_primed(scalar("0"), scalar("0"), dirichlet()), ComputationError);
  CHECK_THROWS_AS(det_ratio_primed(scalar("-pi^2"), scalar("-pi^2"), dirichlet()), ZeroModeError);

  PrimedOptions loose;
  loose.require_zero_mode = false;
  CHECK_NOTHROW(det_ratio_primed(scalar("-pi^2 + 1e-12"), scalar("0"), dirichlet(), {}, loose));

  const Problem ref(-2, 2, Potential::matrix({{"1", "0"}, {"0", "1"}}));
  const DetRatioReport rep = det_ratio_primed(twisted_problem(0.3, 4), ref, twisted(0.3, 4));
  CHECK(rep.self_adjoint.status == SelfAdjointStatus::NotVerified);
  CHECK_FALSE(rep.warnings.empty());
}
