#pragma once

#include "detline/linalg.hpp"
#include "detline/problem.hpp"

#include <cstddef>
#include <vector>

namespace detline {

// Step control for the embedded Runge-Kutta 5(4) integrator. Zero step
// values select the interval-relative defaults.
struct Controls {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // default (b - a) / 100
  double max_step = 0.0;      // default (b - a) / 10
  std::size_t max_steps = 2'000'000;
  bool keep_trajectory = false;

  void validate() const;
};

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double max_error_estimate = 0.0;  // largest accepted scaled error norm
};

// u' = v, v' = (Q(x) - lambda I) u for the 2r-vector (u, v).
class FirstOrderSystem {
 public:
  FirstOrderSystem(const Problem& problem, complex lambda);

  int components() const { return r_; }
  complex lambda() const { return lambda_; }

  // The 2r x 2r generator [[0, I], [Q(x) - lambda I, 0]].
  CMatrix generator(double x) const;
  CVector derivative(double x, const CVector& state) const;

  // dY = A(x) Y for a 2r x m block Y stored column-major in `y`.
  void apply(double x, const complex* y, complex* dy, Eigen::Index columns) const;

 private:
  const Problem* problem_;
  complex lambda_;
  int r_;
  mutable CMatrix q_;
};

FirstOrderSystem assemble_first_order(const Problem& problem, complex lambda);

struct MatrixSample {
  double x;
  CMatrix h;
};

// H(x) with H(a) = I propagated to b.
struct FundamentalSolution {
  complex lambda;
  double a = 0.0;
  double b = 0.0;
  int components = 1;
  CMatrix end;                          // H(b)
  std::vector<MatrixSample> trajectory;  // accepted steps, when requested
  IntegratorStats stats;
  double max_det_drift = 0.0;  // max |det H(x) - 1| over accepted steps
  double max_imag = 0.0;       // max |Im H_ij(x)| over accepted steps
};

FundamentalSolution propagate_fundamental(const Problem& problem, complex lambda,
                                          const Controls& controls = {});

struct StateSample {
  double x;
  CVector state;  // (u_1..u_r, v_1..v_r)
};

// A single solution started from the given 2r-vector at x = a.
struct Trajectory {
  double a = 0.0;
  double b = 0.0;
  int components = 1;
  complex lambda;
  CVector initial;
  std::vector<StateSample> samples;
  IntegratorStats stats;

  const CVector& start() const { return samples.front().state; }
  const CVector& finish() const { return samples.back().state; }
};

Trajectory propagate_combination(const Problem& problem, complex lambda,
                                 const CVector& coefficients, const Controls& controls = {});

// Integral over [a, b] of sum_c conj(u1_c(x)) u2_c(x). Both solutions are
// re-integrated together with the accumulator under one step controller.
complex inner_product(const Problem& problem, const Trajectory& t1, const Trajectory& t2,
                      const Controls& controls = {});

// Solution trajectory plus its squared norm from a single augmented run.
struct NormedTrajectory {
  Trajectory trajectory;
  double norm_squared = 0.0;
};

NormedTrajectory propagate_with_norm(const Problem& problem, complex lambda,
                                     const CVector& coefficients, const Controls& controls = {});

}  // namespace detline
