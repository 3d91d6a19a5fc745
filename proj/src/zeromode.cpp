#include "detline/zeromode.hpp"

#include "detline/errors.hpp"

#include <Eigen/LU>
#include <fmt/format.h>

#include <cmath>
#include <future>

namespace detline {

ZeroModeCheck detect_zero_mode(const Problem& p, const BoundarySpec& bc, double tol,
                               const Controls& controls) {
  const CharacteristicValue c = characteristic_at_zero(p, bc, controls, tol);
  return {c.zero_mode, c.relative_residual(), c.value};
}

namespace {

ZeroModeData build_zero_mode(const Problem& p, const BoundarySpec& bc, const CMatrix& y_end,
                             const Controls& controls, int designated_row) {
  const int r = bc.components();
  ZeroModeData zm;
  CMatrix a = bc.M() + bc.N() * y_end;
  const double scale = std::max(1.0, norm_inf(a));
  zm.residual = std::abs(determinant(a)) / scale;

  if (r == 1) {
    if (designated_row == 0) {
      zm.spec = bc.with_rows_swapped(0, 1);
      zm.rows_swapped = true;
    } else {
      zm.spec = bc;
    }
    zm.initial = first_row_coefficients(*zm.spec, y_end);
    if (zm.initial.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
      zm.spec = zm.spec->with_rows_swapped(0, 1);
      zm.rows_swapped = !zm.rows_swapped;
      zm.initial = first_row_coefficients(*zm.spec, y_end);
      if (zm.initial.cwiseAbs().maxCoeff() <= 1e-12 * scale)
        throw ComputationError(
            "zero mode: both boundary rows give vanishing initial data (kernel dimension > 1?)");
    }
    zm.designated_row = 1;
  } else {
    const int row = designated_row < 0 ? 2 * r - 1 : designated_row;
    if (row >= 2 * r)
      throw InputError(fmt::format("designated row {} outside 0..{}", row, 2 * r - 1));
    zm.spec = bc;
    zm.designated_row = row;
    zm.initial = adjugate(a).col(row);
    if (zm.initial.cwiseAbs().maxCoeff() <= 1e-10 * std::pow(scale, 2 * r - 1))
      throw ComputationError(fmt::format(
          "zero mode: adjugate column {} vanishes; the designated row does not fix the mode "
          "or the kernel has dimension > 1",
          row));
  }

  NormedTrajectory nt = propagate_with_norm(p, 0.0, zm.initial, controls);
  zm.trajectory = std::move(nt.trajectory);
  zm.norm_squared = nt.norm_squared;
  const CVector& s = zm.trajectory.start();
  const CVector& f = zm.trajectory.finish();
  if (!(zm.norm_squared > 1e-24 * std::max(1.0, f.squaredNorm() + s.squaredNorm())))
    throw ComputationError("zero mode: constructed mode has vanishing norm (kernel dimension > 1?)");

  zm.u_a = s.head(r);
  zm.v_a = s.tail(r);
  zm.u_b = f.head(r);
  zm.v_b = f.tail(r);
  const CVector bvals = zm.spec->M() * s + zm.spec->N() * f;
  const double bscale = std::max({1.0, max_abs(zm.spec->M()), max_abs(zm.spec->N())}) *
                        std::max(s.cwiseAbs().maxCoeff(), f.cwiseAbs().maxCoeff());
  zm.boundary_residual = bvals.cwiseAbs().maxCoeff() / bscale;
  return zm;
}

CVector data_vector(const ZeroModeData& zm) {
  const Eigen::Index r = zm.u_a.size();
  CVector w(4 * r);
  w << zm.u_a, zm.v_a, zm.u_b, zm.v_b;
  return w;
}

bool is_dirichlet(const BoundarySpec& bc) {
  if (bc.components() != 1) return false;
  const BoundarySpec d = dirichlet(1);
  return (bc.M() - d.M()).norm() == 0.0 && (bc.N() - d.N()).norm() == 0.0;
}

}  // namespace

ZeroModeData normalized_zero_mode(const Problem& p, const BoundarySpec& bc,
                                  const Controls& controls, int designated_row) {
  if (bc.components() != p.components())
    throw InputError(fmt::format("boundary conditions have r = {}, problem has r = {}",
                                 bc.components(), p.components()));
  const FundamentalSolution fund = propagate_fundamental(p, 0.0, controls);
  return build_zero_mode(p, bc, fund.end, controls, designated_row);
}

std::optional<complex> b_table_case(const BoundarySpec& bc, const ZeroModeData& zm,
                                    int table_case) {
  if (bc.components() != 1) throw InputError("table values of B need r = 1");
  const CMatrix& M = bc.M();
  const CMatrix& N = bc.N();
  const complex m11 = M(0, 0), m12 = M(0, 1), m21 = M(1, 0), m22 = M(1, 1);
  const complex n11 = N(0, 0), n12 = N(0, 1), n21 = N(1, 0), n22 = N(1, 1);
  const complex y0 = std::conj(zm.u_a(0)), y1 = std::conj(zm.u_b(0));
  const complex d0 = std::conj(zm.v_a(0)), d1 = std::conj(zm.v_b(0));

  complex sel, den;
  switch (table_case) {
    case 1: sel = n12 * m22 - m12 * n22; den = m12 * y1 + n12 * y0; break;
    case 2: sel = m11 * n21 - m21 * n11; den = m11 * d1 + n11 * d0; break;
    case 3: sel = m11 * m22 - m12 * m21; den = m12 * d0 + m11 * y0; break;
    case 4: sel = m12 * n21 - m22 * n11; den = m12 * d1 - n11 * y0; break;
    case 5: sel = n12 * n21 - n22 * n11; den = n12 * d1 + n11 * y1; break;
    case 6: sel = m11 * n22 - m21 * n12; den = n12 * d0 - m11 * y1; break;
    default: throw InputError(fmt::format("B table case {} outside 1..6", table_case));
  }
  const double bscale = std::max(max_abs(M), max_abs(N));
  const double yscale = std::max({std::abs(y0), std::abs(y1), std::abs(d0), std::abs(d1)});
  if (std::abs(sel) <= 1e-12 * bscale * bscale) return std::nullopt;
  if (std::abs(den) <= 1e-12 * bscale * yscale) return std::nullopt;
  return sel / den;
}

complex b_from_pivot(const BoundarySpec& bc, const ZeroModeData& zm,
                     const std::vector<int>& pivot) {
  const int r = bc.components();
  if (static_cast<int>(pivot.size()) != 2 * r)
    throw InputError(fmt::format("pivot needs {} columns, got {}", 2 * r, pivot.size()));
  const CMatrix b = bc.stacked();
  CMatrix bp(2 * r, 2 * r);
  for (int k = 0; k < 2 * r; ++k) bp.col(k) = b.col(pivot[k]);
  CVector e = CVector::Zero(2 * r);
  e(zm.designated_row) = 1.0;
  const CVector c = bp.fullPivLu().solve(e);
  const CVector gw = boundary_form_matrix(r) * data_vector(zm).conjugate();
  complex sum = 0.0;
  for (int k = 0; k < 2 * r; ++k) sum += c(k) * gw(pivot[k]);
  if (sum == complex(0.0)) throw ComputationError("B: boundary pairing vanishes");
  return 1.0 / sum;
}

BConstant b_constant(const BoundarySpec& bc, const ZeroModeData& zm) {
  const BoundarySpec& spec = zm.spec ? *zm.spec : bc;
  if (spec.components() != bc.components())
    throw InputError("B: zero mode and boundary conditions have different r");
  BConstant out;
  if (spec.components() > 1) {
    out.value = b_from_pivot(spec, zm, choose_pivot_columns(spec));
    return out;
  }
  for (int c = 1; c <= 6; ++c)
    if (auto v = b_table_case(spec, zm, c)) out.cases.emplace_back(c, *v);
  if (out.cases.empty())
    throw ComputationError("B: no applicable case (selector minors or denominators vanish)");
  out.table_case = out.cases.front().first;
  out.value = out.cases.front().second;
  for (const auto& [c, v] : out.cases)
    out.discrepancy = std::max(out.discrepancy, std::abs(v - out.value) / std::abs(out.value));
  return out;
}

DetRatioReport det_ratio_primed(const Problem& p1, const Problem& p2, const BoundarySpec& bc,
                                const Controls& controls, const PrimedOptions& options) {
  check_compatible(p1, p2, bc);
  DetRatioReport report;
  report.path = "primed";
  report.self_adjoint = check_self_adjoint(bc);
  if (report.self_adjoint.status == SelfAdjointStatus::Fail)
    throw SelfAdjointnessError(
        fmt::format("boundary conditions are not self-adjoint (case {} brackets violated); the "
                    "zero-mode extraction does not apply",
                    report.self_adjoint.pivot_case));
  if (report.self_adjoint.status == SelfAdjointStatus::NotVerified)
    report.warnings.push_back("self-adjointness of the boundary conditions was not verified");

  auto second = std::async(std::launch::async, [&] {
    return characteristic_at_zero(p2, bc, controls, options.zero_mode_tol);
  });
  const CharacteristicValue c1 = characteristic_at_zero(p1, bc, controls, options.zero_mode_tol);
  const CharacteristicValue c2 = second.get();
  if (c2.zero_mode)
    throw ZeroModeError(ZeroModeError::Operator::Denominator,
                        fmt::format("reference operator has a zero mode (|det| = {:.3g})",
                                    std::abs(c2.value)));
  if (options.require_zero_mode && !c1.zero_mode)
    throw ComputationError(fmt::format(
        "no zero mode: relative |det(M + N Y(b))| = {:.3g} exceeds tolerance {:.3g}",
        c1.relative_residual(), options.zero_mode_tol));

  const ZeroModeData zm = build_zero_mode(p1, bc, c1.fund.end, controls, options.designated_row);
  if (zm.boundary_residual > 1e-7)
    throw ComputationError(fmt::format(
        "zero mode violates the boundary conditions (relative residual {:.3g})",
        zm.boundary_residual));
  const BConstant bconst = b_constant(bc, zm);
  if (bconst.discrepancy > 1e-8)
    report.warnings.push_back(
        fmt::format("B cases disagree by {:.3g} (relative)", bconst.discrepancy));

  const complex denominator = determinant(zm.spec->M() + zm.spec->N() * c2.fund.end);
  const complex f10 = -bconst.value * zm.norm_squared;

  report.zero_mode_numerator = true;
  report.numerator = f10;
  report.denominator = denominator;
  report.ratio = f10 / denominator;
  report.b_case = bconst.table_case;
  report.b_system = !bconst.table_case.has_value();
  report.b_constant = bconst.value;
  report.b_discrepancy = bconst.discrepancy;
  report.norm_squared = zm.norm_squared;
  report.boundary_residual = zm.boundary_residual;
  report.zero_mode_residual = zm.residual;
  report.rows_swapped = zm.rows_swapped;
  report.stats_numerator = zm.trajectory.stats;
  report.stats_denominator = c2.fund.stats;

  // A nodeless Dirichlet zero mode is the ground state; with a positive
  // reference the extracted ratio must then be positive.
  if (is_dirichlet(bc) && p1.is_real() && p2.is_real()) {
    const auto& samples = zm.trajectory.samples;
    bool nodeless = true;
    double sign = 0.0;
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
      const double u = samples[k].state(0).real();
      if (sign == 0.0) sign = u > 0 ? 1.0 : -1.0;
      if (u * sign <= 0.0) {
        nodeless = false;
        break;
      }
    }
    if (nodeless && denominator.real() > 0.0 && !(report.ratio.real() > 0.0))
      throw ComputationError(fmt::format(
          "sign check failed: nodeless zero mode but extracted ratio {:.10g}", report.ratio.real()));
  }
  if (p1.is_real() && p2.is_real() && report.self_adjoint.status == SelfAdjointStatus::Pass &&
      !report.is_real())
    report.warnings.push_back(
        fmt::format("imaginary part {:.3g} for a real self-adjoint problem", report.ratio.imag()));
  return report;
}

}  // namespace detline
