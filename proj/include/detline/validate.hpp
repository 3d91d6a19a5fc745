#pragma once

#include <string>
#include <vector>

namespace detline {

struct RegressionRow {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  bool pass = false;
  std::string error;  // set when the computation itself failed
};

// Built-in reference values: Airy ratios, zero-mode extraction, periodic
// closed forms, the twisted system and eigenvalue asymptotics.
std::vector<RegressionRow> run_regression_suite();

// Gamma(1/3) / (2 3^{1/6}) [Bi(1) - sqrt(3) Ai(1)], the Airy Dirichlet ratio.
double airy_dirichlet_reference();

// 8 l^2 (1 - mu^2) sinh^2(l nu / 2) / nu^2 with nu^2 = 2 (1 - 3 mu^2).
double twisted_f10_reference(double mu, double l);

}  // namespace detline
