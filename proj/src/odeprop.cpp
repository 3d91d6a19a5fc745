#include "detline/odeprop.hpp"

#include "detline/errors.hpp"
#include "dopri.hpp"

#include <fmt/format.h>

#include <cmath>

namespace detline {

void Controls::validate() const {
  if (!(rtol >= 1e-14 && rtol <= 1e-4))
    throw InputError(fmt::format("controls: rtol {:g} outside [1e-14, 1e-4]", rtol));
  if (!(atol > 0.0)) throw InputError(fmt::format("controls: atol {:g} must be positive", atol));
  if (initial_step < 0.0 || max_step < 0.0)
    throw InputError("controls: step sizes must be non-negative");
  if (max_steps == 0) throw InputError("controls: max_steps must be positive");
}

FirstOrderSystem::FirstOrderSystem(const Problem& problem, complex lambda)
    : problem_(&problem), lambda_(lambda), r_(problem.components()) {}

CMatrix FirstOrderSystem::generator(double x) const {
  CMatrix g = CMatrix::Zero(2 * r_, 2 * r_);
  g.topRightCorner(r_, r_).setIdentity();
  problem_->q(x, q_);
  g.bottomLeftCorner(r_, r_) = q_;
  g.bottomLeftCorner(r_, r_).diagonal().array() -= lambda_;
  return g;
}

CVector FirstOrderSystem::derivative(double x, const CVector& state) const {
  if (state.size() != 2 * r_)
    throw InputError(fmt::format("state has size {}, expected {}", state.size(), 2 * r_));
  CVector out(2 * r_);
  apply(x, state.data(), out.data(), 1);
  return out;
}

void FirstOrderSystem::apply(double x, const complex* y, complex* dy, Eigen::Index columns) const {
  const Eigen::Index n = 2 * r_;
  Eigen::Map<const CMatrix> in(y, n, columns);
  Eigen::Map<CMatrix> out(dy, n, columns);
  if (r_ == 1) {
    const complex w = problem_->q_scalar(x) - lambda_;
    for (Eigen::Index c = 0; c < columns; ++c) {
      out(0, c) = in(1, c);
      out(1, c) = w * in(0, c);
    }
    return;
  }
  problem_->q(x, q_);
  q_.diagonal().array() -= lambda_;
  out.topRows(r_) = in.bottomRows(r_);
  out.bottomRows(r_).noalias() = q_ * in.topRows(r_);
}

FirstOrderSystem assemble_first_order(const Problem& problem, complex lambda) {
  return FirstOrderSystem(problem, lambda);
}

FundamentalSolution propagate_fundamental(const Problem& problem, complex lambda,
                                          const Controls& controls) {
  const FirstOrderSystem system(problem, lambda);
  const Eigen::Index n = 2 * problem.components();

  FundamentalSolution out;
  out.lambda = lambda;
  out.a = problem.a();
  out.b = problem.b();
  out.components = problem.components();

  CMatrix identity = CMatrix::Identity(n, n);
  CVector y = Eigen::Map<CVector>(identity.data(), n * n);

  auto rhs = [&](double x, const CVector& s, CVector& ds) { system.apply(x, s.data(), ds.data(), n); };
  auto on_accept = [&](double x, const CVector& s) {
    Eigen::Map<const CMatrix> h(s.data(), n, n);
    out.max_det_drift = std::max(out.max_det_drift, std::abs(determinant(h) - complex(1.0)));
    out.max_imag = std::max(out.max_imag, h.imag().cwiseAbs().maxCoeff());
    if (controls.keep_trajectory) out.trajectory.push_back({x, CMatrix(h)});
  };
  out.stats = detail::integrate(rhs, problem.a(), problem.b(), y, controls, on_accept);
  out.end = Eigen::Map<const CMatrix>(y.data(), n, n);
  return out;
}

Trajectory propagate_combination(const Problem& problem, complex lambda,
                                 const CVector& coefficients, const Controls& controls) {
  return propagate_with_norm(problem, lambda, coefficients, controls).trajectory;
}

NormedTrajectory propagate_with_norm(const Problem& problem, complex lambda,
                                     const CVector& coefficients, const Controls& controls) {
  const int r = problem.components();
  if (coefficients.size() != 2 * r)
    throw InputError(fmt::format("combination: expected {} coefficients, got {}", 2 * r,
                                 coefficients.size()));
  if (coefficients.cwiseAbs().maxCoeff() == 0.0)
    throw InputError("combination: coefficients are all zero");

  const FirstOrderSystem system(problem, lambda);
  NormedTrajectory out;
  Trajectory& t = out.trajectory;
  t.a = problem.a();
  t.b = problem.b();
  t.components = r;
  t.lambda = lambda;
  t.initial = coefficients;

  // state = (u, v, accumulated |u|^2)
  CVector y(2 * r + 1);
  y.head(2 * r) = coefficients;
  y(2 * r) = 0.0;
  auto rhs = [&](double x, const CVector& s, CVector& ds) {
    system.apply(x, s.data(), ds.data(), 1);
    ds(2 * r) = s.head(r).squaredNorm();
  };
  auto on_accept = [&](double x, const CVector& s) { t.samples.push_back({x, s.head(2 * r)}); };
  t.stats = detail::integrate(rhs, problem.a(), problem.b(), y, controls, on_accept);
  out.norm_squared = y(2 * r).real();
  return out;
}

complex inner_product(const Problem& problem, const Trajectory& t1, const Trajectory& t2,
                      const Controls& controls) {
  const int r = problem.components();
  for (const Trajectory* t : {&t1, &t2}) {
    if (t->a != problem.a() || t->b != problem.b())
      throw InputError(fmt::format("inner product: trajectory interval [{}, {}] differs from "
                                   "problem interval [{}, {}]",
                                   t->a, t->b, problem.a(), problem.b()));
    if (t->components != r || t->initial.size() != 2 * r)
      throw InputError("inner product: trajectory component count differs from problem");
  }

  const FirstOrderSystem s1(problem, t1.lambda);
  const FirstOrderSystem s2(problem, t2.lambda);
  CVector y(4 * r + 1);
  y.segment(0, 2 * r) = t1.initial;
  y.segment(2 * r, 2 * r) = t2.initial;
  y(4 * r) = 0.0;
  auto rhs = [&](double x, const CVector& s, CVector& ds) {
    s1.apply(x, s.data(), ds.data(), 1);
    s2.apply(x, s.data() + 2 * r, ds.data() + 2 * r, 1);
    ds(4 * r) = s.segment(0, r).dot(s.segment(2 * r, r));  // dot() conjugates the first
  };
  detail::integrate(rhs, problem.a(), problem.b(), y, controls, [](double, const CVector&) {});
  return y(4 * r);
}

}  // namespace detline
