#pragma once

#include "detline/boundary.hpp"
#include "detline/gelfand.hpp"
#include "detline/odeprop.hpp"
#include "detline/problem.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace detline {

struct ZeroModeCheck {
  bool detected = false;
  double residual = 0.0;  // |det(M + N Y(b))| / max(1, ||M + N Y(b)||_inf)
  complex value;
};

ZeroModeCheck detect_zero_mode(const Problem& p, const BoundarySpec& bc,
                               double tol = kZeroModeTolerance, const Controls& controls = {});

struct ZeroModeData {
  // Boundary conditions the normalisation refers to: the input spec, or for
  // r = 1 the same spec with its rows exchanged when the first row is
  // satisfied identically.
  std::optional<BoundarySpec> spec;
  bool rows_swapped = false;
  int designated_row = 0;  // row of `spec` left unsatisfied away from the zero mode

  CVector initial;  // (y(a), y'(a))
  Trajectory trajectory;
  CVector u_a, v_a, u_b, v_b;  // per component
  double norm_squared = 0.0;
  double residual = 0.0;           // relative |det(M + N Y(b))|
  double boundary_residual = 0.0;  // ||M y(a) + N y(b)|| / boundary scale
};

// Zero mode in the determinant-cancelled normalisation: initial data
// adj(M + N Y(b)) e_row. For r = 1 this is (alpha, beta) of the first-row
// construction. `designated_row` < 0 selects the last row.
ZeroModeData normalized_zero_mode(const Problem& p, const BoundarySpec& bc,
                                  const Controls& controls = {}, int designated_row = -1);

struct BConstant {
  complex value;
  std::optional<int> table_case;  // 1..6 for r = 1
  double discrepancy = 0.0;       // max relative spread over applicable cases
  std::vector<std::pair<int, complex>> cases;  // every applicable case
};

// Closed-form values of the constant B for r = 1, in table order; empty when
// the selector minor or the denominator vanishes.
std::optional<complex> b_table_case(const BoundarySpec& bc, const ZeroModeData& zm, int table_case);

// Same constant from an arbitrary set of 2r pivot columns of [M | N]; valid
// for any r.
complex b_from_pivot(const BoundarySpec& bc, const ZeroModeData& zm, const std::vector<int>& pivot);

BConstant b_constant(const BoundarySpec& bc, const ZeroModeData& zm);

struct PrimedOptions {
  double zero_mode_tol = kZeroModeTolerance;
  bool require_zero_mode = true;
  int designated_row = -1;
};

// det' L1 / det L2 = -B <y|y> / det(M + N Y2(b)) = f_{1,0} / det(M + N Y2(b)).
DetRatioReport det_ratio_primed(const Problem& p1, const Problem& p2, const BoundarySpec& bc,
                                const Controls& controls = {}, const PrimedOptions& options = {});

}  // namespace detline
