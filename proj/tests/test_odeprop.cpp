#include "detline/errors.hpp"
#include "detline/odeprop.hpp"

#include "doctest.h"
#include "random_specs.hpp"

#include <cmath>
#include <numbers>

using namespace detline;
using std::numbers::pi;

namespace {

Problem scalar(const std::string& r, double a = 0, double b = 1, ParamMap p = {}) {
  return Problem::scalar(a, b, r, std::move(p));
}

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("first-order right-hand side") {
  const Problem free = scalar("0");
  CVector s(2);
  s << 0.0, 1.0;
  const CVector d = assemble_first_order(free, 1.0).derivative(0.3, s);
  CHECK(d(0) == complex(1.0));
  CHECK(d(1) == complex(0.0));

  s << 1.0, 0.0;
  const CVector e = assemble_first_order(scalar("x", 0, 3), 0.0).derivative(2.0, s);
  CHECK(e(0) == complex(0.0));
  CHECK(e(1) == complex(2.0));

  const Problem two(-2, 2,
                    Potential::matrix({{"1 - 2*mu^2", "(1 - mu^2)*exp(2*i*mu*x)"},
                                       {"(1 - mu^2)*exp(-2*i*mu*x)", "1 - 2*mu^2"}}),
                    {{"mu", 0.0}});
  CVector t = CVector::Zero(4);
  t(0) = 1.0;
  const CVector f = assemble_first_order(two, 0.0).derivative(0.0, t);
  CHECK(f(2) == complex(1.0));
  CHECK(f(3) == complex(1.0));
  const CMatrix g = assemble_first_order(two, 0.5).generator(0.0);
  CHECK(g(2, 0) == complex(0.5));
  CHECK(g(0, 2) == complex(1.0));
}

TEST_CASE("closed-form fundamental matrices") {
  CMatrix expect(2, 2);
  expect << std::cos(1.0), std::sin(1.0), -std::sin(1.0), std::cos(1.0);
  CHECK(max_diff(propagate_fundamental(scalar("0"), 1.0).end, expect) < 1e-10);
  expect << 1, 1, 0, 1;
  CHECK(max_diff(propagate_fundamental(scalar("0"), 0.0).end, expect) < 1e-12);
  const double k = std::sqrt(3.0);
  expect << std::cosh(k * 2), std::sinh(k * 2) / k, k * std::sinh(k * 2), std::cosh(k * 2);
  CHECK(max_diff(propagate_fundamental(scalar("4", -1, 1), 1.0).end, expect) <
        1e-9 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("Airy potential endpoint value") {
  const FundamentalSolution f = propagate_fundamental(scalar("x"), 0.0);
  CHECK(std::abs(f.end(0, 1) - 1.08542) < 1e-4);
  CHECK(f.max_imag == 0.0);
}

TEST_CASE("det H stays one on random problems") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 40; ++k) {
    const auto rp = test::random_problem(rng, 1 + k % 3);
    const FundamentalSolution f = propagate_fundamental(rp.problem, rp.lambda);
    CHECK(f.max_det_drift <= 1e-10);
    CHECK(f.stats.steps > 0);
  }
}

TEST_CASE("real potential and real lambda give real H") {
  const FundamentalSolution f = propagate_fundamental(scalar("x^2 - 3*sin(5*x)"), 2.5);
  CHECK(f.max_imag <= 1e-12);
}

TEST_CASE("H depends on k only through lambda") {
  const complex k(0.7, 0.4);
  const complex l1 = (complex(0, 1) * k) * (complex(0, 1) * k);
  const complex l2 = (complex(0, -1) * k) * (complex(0, -1) * k);
  REQUIRE(l1 == l2);
  const Problem p = scalar("cos(3*x)");
  CHECK(propagate_fundamental(p, l1).end == propagate_fundamental(p, l2).end);
}

TEST_CASE("tighter tolerances agree within the coarse error estimate") {
  const Problem p = scalar("x - 3*cos(2*x)", 0, 2);
  Controls coarse;
  coarse.rtol = 1e-7;
  coarse.atol = 1e-9;
  Controls fine = coarse;
  fine.rtol /= 2;
  fine.atol /= 2;
  const CMatrix hc = propagate_fundamental(p, 1.5, coarse).end;
  const CMatrix hf = propagate_fundamental(p, 1.5, fine).end;
  const CMatrix hx = propagate_fundamental(p, 1.5, Controls{.rtol = 1e-13, .atol = 1e-15}).end;
  const double err = max_diff(hc, hx);
  CHECK(max_diff(hc, hf) <= std::max(err, 1e-7 * hc.cwiseAbs().maxCoeff()));
  CHECK(max_diff(hf, hx) < max_diff(hc, hx) * 1.01 + 1e-14);
}

TEST_CASE("group property across an interior point") {
  ParamMap params{{"c", complex(0.3, -0.2)}};
  const std::string q = "c*x + sin(2*x)";
  const CMatrix whole = propagate_fundamental(Problem::scalar(-1, 2, q, params), 0.8).end;
  const CMatrix left = propagate_fundamental(Problem::scalar(-1, 0.4, q, params), 0.8).end;
  const CMatrix right = propagate_fundamental(Problem::scalar(0.4, 2, q, params), 0.8).end;
  CHECK(max_diff(whole, right * left) < 1e-9);
}

TEST_CASE("combinations and inner products") {
  CVector c(2);
  c << 0.0, 1.0;
  const Trajectory lin = propagate_combination(scalar("0"), 0.0, c);
  CHECK(std::abs(lin.finish()(0) - 1.0) < 1e-12);
  CHECK(std::abs(inner_product(scalar("0"), lin, lin) - 1.0 / 3.0) < 1e-10);

  const Trajectory sine = propagate_combination(scalar("0"), pi * pi, c);
  CHECK(std::abs(sine.finish()(0)) < 1e-10);
  CHECK(std::abs(inner_product(scalar("0"), sine, sine) - 1.0 / (2 * pi * pi)) < 1e-9);
  const NormedTrajectory nt = propagate_with_norm(scalar("0"), pi * pi, c);
  CHECK(std::abs(nt.norm_squared - 1.0 / (2 * pi * pi)) < 1e-9);

  CHECK_THROWS_AS(propagate_combination(scalar("0"), 0.0, CVector::Zero(2)), InputError);
  CHECK_THROWS_AS(inner_product(scalar("0", 0, 2), lin, lin), InputError);
}

TEST_CASE("twisted zero mode is proportional to (e^{i mu x}, -e^{-i mu x})") {
  const double mu = 0.3, l = 4.0;
  const Problem p(-l / 2, l / 2,
                  Potential::matrix({{"1 - 2*mu^2", "(1 - mu^2)*exp(2*i*mu*x)"},
                                     {"(1 - mu^2)*exp(-2*i*mu*x)", "1 - 2*mu^2"}}),
                  {{"mu", mu}});
  const complex i(0, 1);
  CVector c(4);
  const double x0 = -l / 2;
  c << std::exp(i * mu * x0), -std::exp(-i * mu * x0), i * mu * std::exp(i * mu * x0),
      i * mu * std::exp(-i * mu * x0);
  const NormedTrajectory t = propagate_with_norm(p, 0.0, c);
  for (const auto& s : t.trajectory.samples) {
    CHECK(std::abs(s.state(0) - std::exp(i * mu * s.x)) < 1e-8);
    CHECK(std::abs(s.state(1) + std::exp(-i * mu * s.x)) < 1e-8);
  }
  CHECK(t.norm_squared == doctest::Approx(2 * l).epsilon(1e-9));
}

TEST_CASE("control validation and integrator failures") {
  CHECK_THROWS_AS(propagate_fundamental(scalar("0"), 0.0, Controls{.rtol = 1e-3}), InputError);
  CHECK_THROWS_AS(propagate_fundamental(scalar("0"), 0.0, Controls{.rtol = 1e-15}), InputError);
  CHECK_THROWS_AS(propagate_fundamental(scalar("0"), 0.0, Controls{.atol = 0}), InputError);
  Controls tight;
  tight.max_steps = 5;
  CHECK_THROWS_AS(propagate_fundamental(scalar("0"), 1e6, tight), IntegrationError);
  CHECK_THROWS_AS(propagate_fundamental(scalar("1/(x - 0.5)"), 0.0), InputError);
  CHECK_THROWS_AS(propagate_fundamental(scalar("1/(x - 0.51234)^2"), 0.0), IntegrationError);
}
