#pragma once

// Dormand-Prince 5(4) with FSAL and a standard step-size controller. Private
// to the library.

#include "detline/errors.hpp"
#include "detline/linalg.hpp"
#include "detline/odeprop.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace detline::detail {

struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  // fifth-order weights minus embedded fourth-order weights
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// Integrates y' = f(x, y) from a to b in place. `rhs(x, y, dy)` writes the
// derivative; `on_accept(x, y)` is called at a and after each accepted step.
template <class Rhs, class OnAccept>
IntegratorStats integrate(Rhs&& rhs, double a, double b, CVector& y, const Controls& controls,
                          OnAccept&& on_accept) {
  using DP = DormandPrince;
  controls.validate();
  const double span = b - a;
  const double h_max = controls.max_step > 0 ? controls.max_step : span / 10.0;
  double h = controls.initial_step > 0 ? controls.initial_step : span / 100.0;
  h = std::min(h, h_max);

  const Eigen::Index n = y.size();
  CVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), err(n);
  IntegratorStats stats;

  double x = a;
  rhs(x, y, k1);
  ++stats.rhs_evaluations;
  on_accept(x, y);

  const double h_min = 1e-14 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  while (x < b) {
    if (stats.steps + stats.rejected >= controls.max_steps)
      throw IntegrationError(fmt::format(
          "tolerance unachievable: step limit {} reached at x = {}", controls.max_steps, x));
    bool last = false;
    if (x + h >= b || (b - (x + h)) < 1e-12 * span) {
      h = b - x;
      last = true;
    }
    if (h < h_min)
      throw IntegrationError(fmt::format("step-size underflow at x = {} (h = {:g})", x, h));

    tmp = y + h * DP::a21 * k1;
    rhs(x + DP::c2 * h, tmp, k2);
    tmp = y + h * (DP::a31 * k1 + DP::a32 * k2);
    rhs(x + DP::c3 * h, tmp, k3);
    tmp = y + h * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3);
    rhs(x + DP::c4 * h, tmp, k4);
    tmp = y + h * (DP::a51 * k1 + DP::a52 * k2 + DP::a53 * k3 + DP::a54 * k4);
    rhs(x + DP::c5 * h, tmp, k5);
    tmp = y + h * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 + DP::a64 * k4 + DP::a65 * k5);
    rhs(x + h, tmp, k6);
    y_new = y + h * (DP::a71 * k1 + DP::a73 * k3 + DP::a74 * k4 + DP::a75 * k5 + DP::a76 * k6);
    const double x_new = last ? b : x + h;
    rhs(x_new, y_new, k7);
    stats.rhs_evaluations += 6;

    err = h * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 + DP::e6 * k6 +
               DP::e7 * k7);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale =
          controls.atol + controls.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      const double r = std::abs(err(i)) / scale;
      sum += r * r;
    }
    const double norm = std::sqrt(sum / static_cast<double>(n));
    if (!std::isfinite(norm))
      throw IntegrationError(fmt::format("non-finite solution near x = {}", x));

    if (norm <= 1.0) {
      x = x_new;
      y.swap(y_new);
      k1.swap(k7);
      ++stats.steps;
      stats.max_error_estimate = std::max(stats.max_error_estimate, norm);
      on_accept(x, y);
      if (last) break;
      const double factor = norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(norm, -0.2));
      h = std::min(h * factor, h_max);
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
    }
  }
  return stats;
}

}  // namespace detline::detail
