#include "detline/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace detline {

complex determinant(const CMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix is not square");
  const Eigen::Index n = a.rows();
  if (n == 0) return complex(1.0);
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);

  CMatrix lu = a;
  complex det(1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    double best = std::abs(lu(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0) return complex(0.0);
    if (pivot != k) {
      lu.row(k).swap(lu.row(pivot));
      det = -det;
    }
    const complex diag = lu(k, k);
    det *= diag;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const complex factor = lu(i, k) / diag;
      if (factor == complex(0.0)) continue;
      lu.row(i).tail(n - k - 1) -= factor * lu.row(k).tail(n - k - 1);
    }
  }
  return det;
}

CMatrix adjugate(const CMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("adjugate: matrix is not square");
  const Eigen::Index n = a.rows();
  CMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = complex(1.0);
    return adj;
  }
  CMatrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // cofactor C_ij from deleting row i and column j
      for (Eigen::Index r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = a(r, c);
        }
        ++mr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * determinant(minor);
    }
  }
  return adj;
}

int numerical_rank(const CMatrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * s(0)) ++rank;
  return rank;
}

double norm_inf(const CMatrix& a) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) best = std::max(best, a.row(i).cwiseAbs().sum());
  return best;
}

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_real(const CMatrix& a, double tol) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j).imag()) > tol) return false;
  return true;
}

}  // namespace detline
