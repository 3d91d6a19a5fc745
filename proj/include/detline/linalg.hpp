#pragma once

#include <Eigen/Core>

#include <complex>

namespace detline {

using complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Determinant by LU factorisation with partial pivoting; 2x2 handled directly.
complex determinant(const CMatrix& a);

// Transposed cofactor matrix, adj(A) A = A adj(A) = det(A) I. Well defined
// for singular A.
CMatrix adjugate(const CMatrix& a);

// Numerical rank with threshold rel_tol * (largest singular value).
int numerical_rank(const CMatrix& a, double rel_tol = 1e-10);

// Maximum absolute row sum.
double norm_inf(const CMatrix& a);

double max_abs(const CMatrix& a);

bool is_real(const CMatrix& a, double tol = 0.0);

}  // namespace detline
