#include "detline/linalg.hpp"

#include "doctest.h"

#include <Eigen/LU>

#include <random>

using namespace detline;

namespace {

CMatrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = {g(rng), g(rng)};
  return m;
}

}  // namespace

TEST_CASE("determinant matches a reference LU for sizes 1 to 8") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 8; ++n) {
    const CMatrix m = random_matrix(rng, n);
    const complex ref = m.fullPivLu().determinant();
    CHECK(std::abs(determinant(m) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
  CMatrix two(2, 2);
  two << 1.0, 2.0, 3.0, 4.0;
  CHECK(determinant(two) == complex(-2.0));
}

TEST_CASE("adjugate satisfies A adj(A) = det(A) I, also when singular") {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 5; ++n) {
    CMatrix m = random_matrix(rng, n);
    CHECK(((m * adjugate(m)) - determinant(m) * CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-11);
    if (n > 1) {
      m.row(n - 1) = m.row(0) * complex(0.5, 1.0);
      CHECK((m * adjugate(m)).cwiseAbs().maxCoeff() < 1e-11);
      CHECK(adjugate(m).cwiseAbs().maxCoeff() > 1e-3);
    }
  }
  CMatrix two(2, 2);
  two << 1.0, 2.0, 3.0, 4.0;
  CMatrix expected(2, 2);
  expected << 4.0, -2.0, -3.0, 1.0;
  CHECK((adjugate(two) - expected).norm() == 0.0);
}

TEST_CASE("rank, norms and realness") {
  CMatrix m(2, 4);
  m << 1, 0, 0, 0, 2, 0, 0, 0;
  CHECK(numerical_rank(m) == 1);
  m(1, 3) = 1e-3;
  CHECK(numerical_rank(m) == 2);
  CHECK(norm_inf(m) == doctest::Approx(2.001));
  CHECK(max_abs(m) == 2.0);
  CHECK(is_real(m));
  m(0, 1) = complex(0, 1e-14);
  CHECK_FALSE(is_real(m));
  CHECK(is_real(m, 1e-13));
}
