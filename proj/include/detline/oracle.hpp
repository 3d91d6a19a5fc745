#pragma once

#include "detline/boundary.hpp"
#include "detline/odeprop.hpp"
#include "detline/problem.hpp"

#include <array>
#include <limits>
#include <utility>
#include <vector>

namespace detline {

struct ScanOptions {
  // Fixed-step fourth-order Magnus propagation of the real system; cheap and
  // accurate uniformly in lambda. The adaptive integrator is used instead
  // when `use_runge_kutta` is set.
  int magnus_steps = 2048;
  bool use_runge_kutta = false;
  Controls controls;
  // NaN selects the defaults: lambda_min below the smallest potential value,
  // lambda_max from the asymptotic count.
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  double lambda_max = std::numeric_limits<double>::quiet_NaN();
  int threads = 0;  // 0: hardware concurrency
};

struct EigenvalueList {
  std::vector<double> values;
  std::vector<double> residuals;  // |characteristic(lambda_n)|
  std::vector<double> scales;     // max |characteristic| at the bracket ends
  std::vector<std::pair<double, double>> brackets;
  // Minima of |characteristic| touching zero without a sign change:
  // suspected even-multiplicity roots, not included in `values`.
  std::vector<double> suspected_even_roots;
  std::size_t evaluations = 0;
};

// Real characteristic function det(M + N H_lambda(b)) used by the scan.
double scan_characteristic(const Problem& p, const BoundarySpec& bc, double lambda,
                           const ScanOptions& options = {});

// Lowest roots of the characteristic function; r = 1, real potential and
// real boundary matrices. Stops once `count` roots are found, counting each
// suspected even root twice.
EigenvalueList eigenvalue_scan(const Problem& p, const BoundarySpec& bc, int count,
                               const ScanOptions& options = {});

// prod_{n <= N} lambda_n(1) / lambda_n(2). With `skip_zero` the lowest root of
// p1 must vanish (|lambda| < 1e-6) and is left out of the numerator.
double truncated_product_ratio(const Problem& p1, const Problem& p2, const BoundarySpec& bc,
                               int n, bool skip_zero, const ScanOptions& options = {});

double truncated_product_ratio(const EigenvalueList& l1, const EigenvalueList& l2, int n,
                               bool skip_zero);

struct AiryValues {
  double ai, bi, ai_prime, bi_prime;
};

// Maclaurin series evaluation, |x| <= 6.
AiryValues airy_reference(double x);

// Y(x) for the twisted two-component system built from the closed-form
// solutions; rows (u1, u2, u1', u2'), Y(-l/2) = I. Requires mu^2 < 1/3.
CMatrix analytic_fundamental_twisted(double x, double mu, double l);

// The matrix potential of the twisted system as expression strings.
std::array<std::array<const char*, 2>, 2> twisted_potential_text();

}  // namespace detline
