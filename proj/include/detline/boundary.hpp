#pragma once

#include "detline/linalg.hpp"
#include "detline/odeprop.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace detline {

enum class BoundaryKind { Dirichlet, Neumann, Robin, Periodic, Twisted, Custom };

std::string to_string(BoundaryKind kind);

// Boundary conditions M (u(a), u'(a)) + N (u(b), u'(b)) = 0 with 2r x 2r
// complex M, N. Immutable once constructed.
class BoundarySpec {
 public:
  // Validates shapes and full row rank of [M | N].
  BoundarySpec(CMatrix m, CMatrix n, BoundaryKind kind = BoundaryKind::Custom,
               std::string tag = "custom");

  int components() const { return r_; }
  const CMatrix& M() const { return m_; }
  const CMatrix& N() const { return n_; }
  BoundaryKind kind() const { return kind_; }
  const std::string& tag() const { return tag_; }

  // The 2r x 4r block [M | N].
  CMatrix stacked() const;
  bool is_real() const;
  // Conditions at a and at b do not mix: rank M + rank N = 2r.
  bool is_separated() const;

  // Same conditions with the two rows of a scalar spec exchanged.
  BoundarySpec with_rows_swapped(int i, int j) const;

 private:
  int r_;
  CMatrix m_;
  CMatrix n_;
  BoundaryKind kind_;
  std::string tag_;
};

BoundarySpec dirichlet(int r = 1);
BoundarySpec neumann(int r = 1);
BoundarySpec robin(complex A, complex B, complex C, complex D);
BoundarySpec periodic(int r = 1);
// r = 2: M = -diag(e^{i mu l}, e^{-i mu l}, e^{i mu l}, e^{-i mu l}), N = I.
BoundarySpec twisted(double mu, double l);

// Named constructor dispatch. Robin reads A, B, C, D; twisted reads mu, l.
BoundarySpec named_bc(BoundaryKind kind, const std::map<std::string, complex>& params, int r);

// det(M + N H(b)); its zeros in lambda are the eigenvalues.
complex characteristic(const BoundarySpec& bc, const FundamentalSolution& fund);
complex characteristic(const BoundarySpec& bc, const CMatrix& h_end);

// Values of a scalar solution and its derivative at both ends.
struct EndpointData {
  complex u_a, v_a, u_b, v_b;
};

// Initial data (alpha, beta) of the solution satisfying the first boundary
// row, normalised so that the second row evaluates to det(M + N H(b)):
// alpha = -[m12 + n11 h12 + n12 h22], beta = m11 + n11 h11 + n12 h21.
CVector first_row_coefficients(const BoundarySpec& bc, const CMatrix& h_end);

// Endpoint data of that solution given H(b).
EndpointData normalized_solution(const BoundarySpec& bc, const CMatrix& h_end);

// m21 u(a) + m22 v(a) + n21 u(b) + n22 v(b). r = 1 only.
complex reduced_boundary_form(const BoundarySpec& bc, const EndpointData& data);

enum class SelfAdjointStatus { Pass, Fail, NotVerified };

std::string to_string(SelfAdjointStatus status);

struct SelfAdjointReport {
  SelfAdjointStatus status = SelfAdjointStatus::NotVerified;
  int pivot_case = 0;  // 1..6 in table order; 0 when not evaluated
  // Coefficients of u_k(b)u_0(a)*, u_k(a)u_0(b)*, u_k(b)u_0(b)*, u_k(a)u_0(a)*
  // left over after eliminating the pivot pair; all vanish when self-adjoint.
  std::array<complex, 4> brackets{};
  std::vector<int> violated;  // indices into `brackets`
  complex det_m, det_n;
  bool real_matrices = false;
  std::optional<bool> dets_equal;  // reported for real M, N
};

// Scalar (r = 1) check; r > 1 reports NotVerified.
SelfAdjointReport check_self_adjoint(const BoundarySpec& bc);

// Boundary data vector (u(a), v(a), u(b), v(b)) for r components, length 4r.
// The sesquilinear boundary form sum_c [v_w* u - v w*]_a^b equals
// U^T G conj(W) with this G.
CMatrix boundary_form_matrix(int r);

// Columns of [M | N] (2r of 4r) used to eliminate boundary data. For r = 1
// `table_case` 1..6 selects the pairs (v(a), v(b)), (u(a), u(b)), (u(a), v(a)),
// (v(a), u(b)), (u(b), v(b)), (u(a), v(b)).
std::vector<int> pivot_columns_for_case(int table_case);
std::vector<int> choose_pivot_columns(const BoundarySpec& bc);

// Residual form K on the complementary data after eliminating `pivot`; the
// boundary conditions are self-adjoint iff K = 0.
CMatrix self_adjoint_residual(const BoundarySpec& bc, const std::vector<int>& pivot);

}  // namespace detline
