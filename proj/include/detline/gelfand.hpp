#pragma once

#include "detline/boundary.hpp"
#include "detline/odeprop.hpp"
#include "detline/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace detline {

// det(M + N Y(b)) at lambda = 0 together with the scale used for zero-mode
// screening.
struct CharacteristicValue {
  complex value;
  double scale = 1.0;  // max(1, ||M + N Y(b)||_inf)
  bool zero_mode = false;
  FundamentalSolution fund;

  double relative_residual() const { return std::abs(value) / scale; }
};

inline constexpr double kZeroModeTolerance = 1e-8;

CharacteristicValue characteristic_at_zero(const Problem& p, const BoundarySpec& bc,
                                           const Controls& controls = {},
                                           double tol = kZeroModeTolerance);

struct DetRatioReport {
  complex ratio;
  std::string path = "plain";  // "plain" or "primed"
  bool zero_mode_numerator = false;
  bool zero_mode_denominator = false;
  complex numerator;    // det(M + N Y1(b)), or f_{1,0} on the primed path
  complex denominator;  // det(M + N Y2(b))

  // primed path only
  std::optional<int> b_case;  // 1..6 for r = 1; empty with b_system set for r > 1
  bool b_system = false;
  complex b_constant;
  double b_discrepancy = 0.0;
  double norm_squared = 0.0;
  double boundary_residual = 0.0;
  double zero_mode_residual = 0.0;
  bool rows_swapped = false;

  SelfAdjointReport self_adjoint;
  IntegratorStats stats_numerator;
  IntegratorStats stats_denominator;
  std::vector<std::string> warnings;

  bool is_real() const { return std::abs(ratio.imag()) <= 1e-10 * (1.0 + std::abs(ratio)); }
};

// det L1 / det L2 = det(M + N Y1(b)) / det(M + N Y2(b)). Throws ZeroModeError
// when either operator has a zero mode.
DetRatioReport det_ratio(const Problem& p1, const Problem& p2, const BoundarySpec& bc,
                         const Controls& controls = {});

// y1(b) / y2(b) for the solutions with y(a) = 0, y'(a) = 1. r = 1.
double dirichlet_ratio(const Problem& p1, const Problem& p2, const Controls& controls = {});

// The same ratio for solutions carrying arbitrary derivative normalisations:
// y1(b) y2'(a) / (y1'(a) y2(b)).
complex dirichlet_ratio_normalized(complex y1_b, complex y1p_a, complex y2_b, complex y2p_a);

void check_compatible(const Problem& p1, const Problem& p2, const BoundarySpec& bc);

}  // namespace detline
