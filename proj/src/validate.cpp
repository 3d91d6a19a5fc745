#include "detline/validate.hpp"

#include "detline/boundary.hpp"
#include "detline/gelfand.hpp"
#include "detline/oracle.hpp"
#include "detline/zeromode.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace detline {

using std::numbers::pi;

double airy_dirichlet_reference() {
  const AiryValues v = airy_reference(1.0);
  return std::tgamma(1.0 / 3.0) / (2.0 * std::pow(3.0, 1.0 / 6.0)) *
         (v.bi - std::sqrt(3.0) * v.ai);
}

double twisted_f10_reference(double mu, double l) {
  const double nu2 = 2.0 * (1.0 - 3.0 * mu * mu);
  const double s = std::sinh(l * std::sqrt(nu2) / 2.0);
  return 8.0 * l * l * (1.0 - mu * mu) * s * s / nu2;
}

namespace {

Problem twisted_problem(double mu, double l) {
  const auto text = twisted_potential_text();
  Potential q = Potential::matrix({{text[0][0], text[0][1]}, {text[1][0], text[1][1]}});
  return Problem(-l / 2, l / 2, q, {{"mu", mu}});
}

Problem identity_problem(double l) {
  return Problem(-l / 2, l / 2, Potential::matrix({{"1", "0"}, {"0", "1"}}));
}

double lowest_airy_root() {
  return eigenvalue_scan(Problem::scalar(0, 1, "x"), dirichlet(), 1).values.at(0);
}

}  // namespace

std::vector<RegressionRow> run_regression_suite() {
  struct Case {
    const char* name;
    std::function<double()> compute;
    double expected;
    double tolerance;
    bool relative;
  };
  const double s05 = std::sinh(0.5), s1 = std::sinh(1.0);
  const std::vector<Case> cases = {
      {"airy_dirichlet_ratio",
       [] { return det_ratio(Problem::scalar(0, 1, "x"), Problem::scalar(0, 1, "0"), dirichlet())
                .ratio.real(); },
       airy_dirichlet_reference(), 1e-8, false},
      {"airy_lowest_root", lowest_airy_root, 10.3685, 1e-3, false},
      {"airy_zero_mode_primed",
       [] {
         const double x0 = lowest_airy_root();
         return det_ratio_primed(Problem::scalar(0, 1, "x - x0", {{"x0", x0}}),
                                 Problem::scalar(0, 1, "0"), dirichlet())
             .ratio.real();
       },
       0.050666, 1e-4, false},
      {"shifted_free_zero_mode_primed",
       [] { return det_ratio_primed(Problem::scalar(0, 1, "-pi^2"), Problem::scalar(0, 1, "0"),
                                    dirichlet())
                .ratio.real(); },
       1.0 / (2.0 * pi * pi), 1e-8, false},
      {"periodic_zero_mode_primed",
       [] { return det_ratio_primed(Problem::scalar(0, 1, "0"), Problem::scalar(0, 1, "1"),
                                    periodic())
                .ratio.real(); },
       1.0 / (4.0 * s05 * s05), 1e-8, false},
      {"periodic_constant_ratio",
       [] { return det_ratio(Problem::scalar(0, 1, "1"), Problem::scalar(0, 1, "4"), periodic())
                .ratio.real(); },
       s05 * s05 / (s1 * s1), 1e-8, false},
      {"twisted_f10",
       [] {
         return det_ratio_primed(twisted_problem(0.3, 4.0), identity_problem(4.0),
                                 twisted(0.3, 4.0))
             .numerator.real();
       },
       twisted_f10_reference(0.3, 4.0), 1e-6, true},
      {"airy_eigenvalue_asymptotics_n2_5",
       [] {
         const auto list = eigenvalue_scan(Problem::scalar(0, 1, "x"), dirichlet(), 5);
         double worst = 0.0;
         for (int n = 2; n <= 5; ++n) {
           const double approx = n * n * pi * pi + 0.5;
           worst = std::max(worst, std::abs(list.values.at(n - 1) - approx) / (n * n * pi * pi));
         }
         return worst;
       },
       0.0, 1e-4, false},
  };

  std::vector<RegressionRow> rows;
  for (const Case& c : cases) {
    RegressionRow row;
    row.name = c.name;
    row.expected = c.expected;
    row.tolerance = c.tolerance;
    row.relative = c.relative;
    try {
      row.computed = c.compute();
      const double dev = std::abs(row.computed - row.expected);
      row.pass = c.relative ? dev <= c.tolerance * std::abs(c.expected) : dev <= c.tolerance;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detline
