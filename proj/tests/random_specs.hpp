#pragma once

// Random problems and boundary conditions shared by the property tests.

#include "detline/boundary.hpp"
#include "detline/oracle.hpp"
#include "detline/problem.hpp"

#include <optional>
#include <random>

namespace detline::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline complex cuniform(std::mt19937_64& rng, double scale) {
  return {uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

struct RandomProblem {
  Problem problem;
  complex lambda;
};

// Entries c0 + c1 x + c2 sin(c3 x); complex off the diagonal for r > 1.
inline RandomProblem random_problem(std::mt19937_64& rng, int r) {
  const double a = uniform(rng, -1.0, 1.0);
  const double b = a + uniform(rng, 0.5, 1.5);
  ParamMap params;
  std::vector<std::vector<std::string>> rows(r, std::vector<std::string>(r));
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < r; ++k) {
      const std::string s = "_" + std::to_string(i) + std::to_string(k);
      const bool complex_entry = i != k;
      for (int c = 0; c < 4; ++c) {
        const std::string name = "c" + std::to_string(c) + s;
        params[name] = complex_entry && c != 3 ? cuniform(rng, 1.0) : complex(uniform(rng, -1, 1));
      }
      rows[i][k] = "c0" + s + " + c1" + s + "*x + c2" + s + "*sin(c3" + s + "*x)";
    }
  }
  return {Problem(a, b, Potential::matrix(rows), params), cuniform(rng, 2.0)};
}

// kind 0: Robin, 1: endpoint-coupled, 2: arbitrary complex.
inline BoundarySpec random_scalar_spec(std::mt19937_64& rng, int kind) {
  if (kind == 0)
    return robin(uniform(rng, -2, 2), uniform(rng, 0.3, 2), uniform(rng, -2, 2), uniform(rng, 0.3, 2));
  CMatrix g(2, 2), m(2, 2), n(2, 2);
  for (Eigen::Index k = 0; k < 4; ++k) g.data()[k] = cuniform(rng, 1.0);
  g.diagonal().array() += 2.0;
  if (kind == 1) {
    for (Eigen::Index k = 0; k < 4; ++k) m.data()[k] = cuniform(rng, 1.0);
    return BoundarySpec(g * m, -g);
  }
  for (Eigen::Index k = 0; k < 4; ++k) {
    m.data()[k] = cuniform(rng, 1.0);
    n.data()[k] = cuniform(rng, 1.0);
  }
  return BoundarySpec(m, n);
}

// Real self-adjoint conditions mixed by a random invertible row operation.
inline BoundarySpec random_self_adjoint_spec(std::mt19937_64& rng, int kind) {
  CMatrix m(2, 2), n(2, 2);
  switch (kind % 4) {
    case 0: {
      const BoundarySpec r =
          robin(uniform(rng, -2, 2), uniform(rng, 0.5, 2), uniform(rng, -2, 2), uniform(rng, 0.5, 2));
      m = r.M();
      n = r.N();
      break;
    }
    case 1: {
      const double p = uniform(rng, 0.5, 2), q = uniform(rng, -1, 1), s = uniform(rng, -1, 1);
      m << p, q, s, (1.0 + q * s) / p;
      n = -CMatrix::Identity(2, 2);
      break;
    }
    case 2:
      m = CMatrix::Identity(2, 2);
      n = CMatrix::Identity(2, 2);
      break;
    default: {
      const double a = uniform(rng, 0.5, 2);
      m << a, 0, 0, 1 / a;
      n = -CMatrix::Identity(2, 2);
    }
  }
  CMatrix g(2, 2);
  g << uniform(rng, -1, 1) + 2, uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1) + 2;
  return BoundarySpec(g * m, g * n);
}

struct ZeroModeInstance {
  Problem problem;
  BoundarySpec bc;
  double shift;
};

// Real potential shifted by its lowest eigenvalue under random self-adjoint
// conditions, so that the shifted operator has a zero mode.
inline std::optional<ZeroModeInstance> random_zero_mode_instance(std::mt19937_64& rng) {
  static int counter = 0;
  const BoundarySpec bc = random_self_adjoint_spec(rng, counter++);
  ParamMap params{{"c0", uniform(rng, -1, 1)},
                  {"c1", uniform(rng, -2, 2)},
                  {"c2", uniform(rng, -1, 1)},
                  {"c3", uniform(rng, 1, 4)}};
  const std::string text = "c0 + c1*x + c2*sin(c3*x)";
  try {
    ScanOptions options;
    options.use_runge_kutta = true;
    options.lambda_min = -60.0;
    const Problem base = Problem::scalar(0, 1, text, params);
    const double lam = eigenvalue_scan(base, bc, 1, options).values.at(0);
    params["lam"] = lam;
    return ZeroModeInstance{Problem::scalar(0, 1, text + " - lam", params), bc, lam};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detline::test
