#include "detline/gelfand.hpp"

#include "detline/errors.hpp"

#include <fmt/format.h>

#include <future>

namespace detline {

void check_compatible(const Problem& p1, const Problem& p2, const BoundarySpec& bc) {
  if (p1.a() != p2.a() || p1.b() != p2.b())
    throw InputError(fmt::format("problems live on different intervals [{}, {}] and [{}, {}]",
                                 p1.a(), p1.b(), p2.a(), p2.b()));
  if (p1.components() != p2.components())
    throw InputError(fmt::format("problems have {} and {} components", p1.components(),
                                 p2.components()));
  if (bc.components() != p1.components())
    throw InputError(fmt::format("boundary conditions have r = {}, problems have r = {}",
                                 bc.components(), p1.components()));
}

CharacteristicValue characteristic_at_zero(const Problem& p, const BoundarySpec& bc,
                                           const Controls& controls, double tol) {
  if (bc.components() != p.components())
    throw InputError(fmt::format("boundary conditions have r = {}, problem has r = {}",
                                 bc.components(), p.components()));
  CharacteristicValue out;
  out.fund = propagate_fundamental(p, 0.0, controls);
  const CMatrix a = bc.M() + bc.N() * out.fund.end;
  out.value = determinant(a);
  out.scale = std::max(1.0, norm_inf(a));
  out.zero_mode = std::abs(out.value) <= tol * out.scale;
  return out;
}

DetRatioReport det_ratio(const Problem& p1, const Problem& p2, const BoundarySpec& bc,
                         const Controls& controls) {
  check_compatible(p1, p2, bc);
  auto second = std::async(std::launch::async,
                           [&] { return characteristic_at_zero(p2, bc, controls); });
  const CharacteristicValue c1 = characteristic_at_zero(p1, bc, controls);
  const CharacteristicValue c2 = second.get();

  if (c2.zero_mode)
    throw ZeroModeError(ZeroModeError::Operator::Denominator,
                        fmt::format("reference operator has a zero mode (|det| = {:.3g}); "
                                    "ratios against a singular reference are not supported",
                                    std::abs(c2.value)));
  if (c1.zero_mode)
    throw ZeroModeError(ZeroModeError::Operator::Numerator,
                        fmt::format("operator has a zero mode (|det| = {:.3g}); use the "
                                    "zero-mode extracted ratio",
                                    std::abs(c1.value)));

  DetRatioReport report;
  report.numerator = c1.value;
  report.denominator = c2.value;
  report.ratio = c1.value / c2.value;
  report.self_adjoint = check_self_adjoint(bc);
  report.stats_numerator = c1.fund.stats;
  report.stats_denominator = c2.fund.stats;
  if (p1.is_real() && p2.is_real() && report.self_adjoint.status == SelfAdjointStatus::Pass &&
      !report.is_real())
    report.warnings.push_back(
        fmt::format("imaginary part {:.3g} for a real self-adjoint problem", report.ratio.imag()));
  return report;
}

double dirichlet_ratio(const Problem& p1, const Problem& p2, const Controls& controls) {
  if (p1.components() != 1 || p2.components() != 1)
    throw InputError("dirichlet_ratio: scalar problems required");
  const DetRatioReport report = det_ratio(p1, p2, dirichlet(1), controls);
  if (!report.is_real())
    throw ComputationError(
        fmt::format("dirichlet_ratio: complex result {}{:+}i", report.ratio.real(),
                    report.ratio.imag()));
  return report.ratio.real();
}

complex dirichlet_ratio_normalized(complex y1_b, complex y1p_a, complex y2_b, complex y2p_a) {
  if (y1p_a == complex(0.0) || y2_b == complex(0.0))
    throw InputError("dirichlet_ratio_normalized: vanishing normalisation");
  return y1_b * y2p_a / (y1p_a * y2_b);
}

}  // namespace detline
