#include "detline/boundary.hpp"

#include "detline/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace detline {

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Robin: return "robin";
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::Twisted: return "twisted";
    case BoundaryKind::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(SelfAdjointStatus status) {
  switch (status) {
    case SelfAdjointStatus::Pass: return "pass";
    case SelfAdjointStatus::Fail: return "fail";
    case SelfAdjointStatus::NotVerified: return "not verified";
  }
  return "not verified";
}

BoundarySpec::BoundarySpec(CMatrix m, CMatrix n, BoundaryKind kind, std::string tag)
    : m_(std::move(m)), n_(std::move(n)), kind_(kind), tag_(std::move(tag)) {
  if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0)
    throw InputError(fmt::format("boundary: M must be 2r x 2r, got {}x{}", m_.rows(), m_.cols()));
  if (n_.rows() != m_.rows() || n_.cols() != m_.cols())
    throw InputError(fmt::format("boundary: N must match M ({}x{}), got {}x{}", m_.rows(),
                                 m_.cols(), n_.rows(), n_.cols()));
  r_ = static_cast<int>(m_.rows() / 2);
  for (Eigen::Index k = 0; k < m_.size(); ++k)
    if (!std::isfinite(std::abs(m_.data()[k])) || !std::isfinite(std::abs(n_.data()[k])))
      throw InputError("boundary: non-finite matrix entry");
  const int rank = numerical_rank(stacked(), 1e-10);
  if (rank != 2 * r_)
    throw InputError(
        fmt::format("boundary: [M | N] has rank {}, expected full row rank {}", rank, 2 * r_));
}

CMatrix BoundarySpec::stacked() const {
  CMatrix b(m_.rows(), 2 * m_.cols());
  b << m_, n_;
  return b;
}

bool BoundarySpec::is_real() const { return detline::is_real(m_) && detline::is_real(n_); }

bool BoundarySpec::is_separated() const {
  return numerical_rank(m_, 1e-10) + numerical_rank(n_, 1e-10) == 2 * r_;
}

BoundarySpec BoundarySpec::with_rows_swapped(int i, int j) const {
  CMatrix m = m_;
  CMatrix n = n_;
  m.row(i).swap(m.row(j));
  n.row(i).swap(n.row(j));
  return BoundarySpec(std::move(m), std::move(n), kind_, tag_);
}

BoundarySpec dirichlet(int r) {
  if (r < 1) throw InputError("dirichlet: r must be at least 1");
  CMatrix m = CMatrix::Zero(2 * r, 2 * r);
  CMatrix n = CMatrix::Zero(2 * r, 2 * r);
  m.topLeftCorner(r, r).setIdentity();
  n.bottomLeftCorner(r, r).setIdentity();
  return BoundarySpec(m, n, BoundaryKind::Dirichlet, "dirichlet");
}

BoundarySpec neumann(int r) {
  if (r < 1) throw InputError("neumann: r must be at least 1");
  CMatrix m = CMatrix::Zero(2 * r, 2 * r);
  CMatrix n = CMatrix::Zero(2 * r, 2 * r);
  m.topRightCorner(r, r).setIdentity();
  n.bottomRightCorner(r, r).setIdentity();
  return BoundarySpec(m, n, BoundaryKind::Neumann, "neumann");
}

BoundarySpec robin(complex A, complex B, complex C, complex D) {
  if (A == complex(0.0) && B == complex(0.0))
    throw InputError("robin: A and B must not both vanish");
  if (C == complex(0.0) && D == complex(0.0))
    throw InputError("robin: C and D must not both vanish");
  CMatrix m = CMatrix::Zero(2, 2);
  CMatrix n = CMatrix::Zero(2, 2);
  m(0, 0) = A;
  m(0, 1) = B;
  n(1, 0) = C;
  n(1, 1) = D;
  auto show = [](complex z) {
    return z.imag() == 0.0 ? fmt::format("{:g}", z.real())
                           : fmt::format("{:g}{:+g}i", z.real(), z.imag());
  };
  return BoundarySpec(m, n, BoundaryKind::Robin,
                      fmt::format("robin({},{},{},{})", show(A), show(B), show(C), show(D)));
}

BoundarySpec periodic(int r) {
  if (r < 1) throw InputError("periodic: r must be at least 1");
  CMatrix m = CMatrix::Identity(2 * r, 2 * r);
  CMatrix n = -CMatrix::Identity(2 * r, 2 * r);
  return BoundarySpec(m, n, BoundaryKind::Periodic, "periodic");
}

BoundarySpec twisted(double mu, double l) {
  if (!std::isfinite(mu) || !std::isfinite(l) || !(l > 0.0))
    throw InputError("twisted: mu must be finite and l positive");
  const complex plus = std::polar(1.0, mu * l);
  const complex minus = std::polar(1.0, -mu * l);
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = -plus;
  m(1, 1) = -minus;
  m(2, 2) = -plus;
  m(3, 3) = -minus;
  CMatrix n = CMatrix::Identity(4, 4);
  return BoundarySpec(m, n, BoundaryKind::Twisted, fmt::format("twisted(mu={:g},l={:g})", mu, l));
}

BoundarySpec named_bc(BoundaryKind kind, const std::map<std::string, complex>& params, int r) {
  auto get = [&](const char* name) -> complex {
    auto it = params.find(name);
    if (it == params.end())
      throw InputError(fmt::format("{} boundary requires parameter '{}'", to_string(kind), name));
    return it->second;
  };
  switch (kind) {
    case BoundaryKind::Dirichlet: return dirichlet(r);
    case BoundaryKind::Neumann: return neumann(r);
    case BoundaryKind::Periodic: return periodic(r);
    case BoundaryKind::Robin:
      if (r != 1) throw InputError("robin boundary requires r = 1");
      return robin(get("A"), get("B"), get("C"), get("D"));
    case BoundaryKind::Twisted: {
      if (r != 2) throw InputError("twisted boundary requires r = 2");
      const complex mu = get("mu");
      const complex l = get("l");
      if (mu.imag() != 0.0 || l.imag() != 0.0)
        throw InputError("twisted boundary requires real mu and l");
      return twisted(mu.real(), l.real());
    }
    case BoundaryKind::Custom: break;
  }
  throw InputError("custom boundary conditions need explicit M and N");
}

complex characteristic(const BoundarySpec& bc, const CMatrix& h_end) {
  if (h_end.rows() != bc.M().rows() || h_end.cols() != bc.M().cols())
    throw InputError(fmt::format("characteristic: H(b) is {}x{}, boundary expects {}x{}",
                                 h_end.rows(), h_end.cols(), bc.M().rows(), bc.M().cols()));
  return determinant(bc.M() + bc.N() * h_end);
}

complex characteristic(const BoundarySpec& bc, const FundamentalSolution& fund) {
  if (fund.components != bc.components())
    throw InputError(fmt::format("characteristic: solution has r = {}, boundary has r = {}",
                                 fund.components, bc.components()));
  return characteristic(bc, fund.end);
}

CVector first_row_coefficients(const BoundarySpec& bc, const CMatrix& h) {
  if (bc.components() != 1 || h.rows() != 2 || h.cols() != 2)
    throw InputError("first_row_coefficients: scalar (r = 1) data required");
  const CMatrix& m = bc.M();
  const CMatrix& n = bc.N();
  CVector c(2);
  c(0) = -(m(0, 1) + n(0, 0) * h(0, 1) + n(0, 1) * h(1, 1));
  c(1) = m(0, 0) + n(0, 0) * h(0, 0) + n(0, 1) * h(1, 0);
  return c;
}

EndpointData normalized_solution(const BoundarySpec& bc, const CMatrix& h_end) {
  const CVector c = first_row_coefficients(bc, h_end);
  const CVector end = h_end * c;
  return {c(0), c(1), end(0), end(1)};
}

complex reduced_boundary_form(const BoundarySpec& bc, const EndpointData& d) {
  if (bc.components() != 1)
    throw InputError("reduced_boundary_form: only r = 1 is supported; use the adjugate "
                     "normalisation for systems");
  const CMatrix& m = bc.M();
  const CMatrix& n = bc.N();
  return m(1, 0) * d.u_a + m(1, 1) * d.v_a + n(1, 0) * d.u_b + n(1, 1) * d.v_b;
}

CMatrix boundary_form_matrix(int r) {
  CMatrix g = CMatrix::Zero(4 * r, 4 * r);
  for (int c = 0; c < r; ++c) {
    const int ua = c, va = r + c, ub = 2 * r + c, vb = 3 * r + c;
    g(ub, vb) = 1.0;
    g(vb, ub) = -1.0;
    g(ua, va) = -1.0;
    g(va, ua) = 1.0;
  }
  return g;
}

std::vector<int> pivot_columns_for_case(int table_case) {
  // column order of [M | N] for r = 1: u(a), v(a), u(b), v(b)
  switch (table_case) {
    case 1: return {1, 3};
    case 2: return {0, 2};
    case 3: return {0, 1};
    case 4: return {1, 2};
    case 5: return {2, 3};
    case 6: return {0, 3};
  }
  throw InputError(fmt::format("pivot case {} outside 1..6", table_case));
}

namespace {

CMatrix select_columns(const CMatrix& b, const std::vector<int>& cols) {
  CMatrix out(b.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = b.col(cols[k]);
  return out;
}

std::vector<int> complement(const std::vector<int>& cols, int total) {
  std::vector<int> out;
  for (int k = 0; k < total; ++k)
    if (std::find(cols.begin(), cols.end(), k) == cols.end()) out.push_back(k);
  return out;
}

// |det| of the block normalised by its largest entry, so the test is scale free.
double relative_minor(const CMatrix& block) {
  const double s = max_abs(block);
  if (s == 0.0) return 0.0;
  return std::abs(determinant(block / s));
}

}  // namespace

std::vector<int> choose_pivot_columns(const BoundarySpec& bc) {
  const int r = bc.components();
  const CMatrix b = bc.stacked();
  std::vector<int> b_side, a_side;
  for (int k = 0; k < 2 * r; ++k) {
    a_side.push_back(k);
    b_side.push_back(2 * r + k);
  }
  for (const auto& cand : {b_side, a_side})
    if (relative_minor(select_columns(b, cand)) > 1e-8) return cand;
  Eigen::ColPivHouseholderQR<CMatrix> qr(b);
  std::vector<int> cols;
  for (int k = 0; k < 2 * r; ++k) cols.push_back(qr.colsPermutation().indices()(k));
  std::sort(cols.begin(), cols.end());
  return cols;
}

CMatrix self_adjoint_residual(const BoundarySpec& bc, const std::vector<int>& pivot) {
  const int r = bc.components();
  const CMatrix b = bc.stacked();
  const std::vector<int> rest = complement(pivot, 4 * r);
  const CMatrix bp = select_columns(b, pivot);
  const CMatrix bc_ = select_columns(b, rest);
  const CMatrix e = bp.fullPivLu().solve(bc_);
  const CMatrix g = boundary_form_matrix(r);

  auto sub = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
    CMatrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = g(rows[i], cols[j]);
    return out;
  };
  const CMatrix g_pp = sub(pivot, pivot), g_pc = sub(pivot, rest), g_cp = sub(rest, pivot),
                g_cc = sub(rest, rest);
  const CMatrix e_conj = e.conjugate();
  return g_cc - e.transpose() * g_pc - g_cp * e_conj + e.transpose() * g_pp * e_conj;
}

SelfAdjointReport check_self_adjoint(const BoundarySpec& bc) {
  SelfAdjointReport report;
  report.det_m = determinant(bc.M());
  report.det_n = determinant(bc.N());
  report.real_matrices = bc.is_real();
  if (bc.components() != 1) {
    report.status = SelfAdjointStatus::NotVerified;
    return report;
  }
  const double scale = std::max(max_abs(bc.M()), max_abs(bc.N()));
  if (report.real_matrices)
    report.dets_equal =
        std::abs(report.det_m - report.det_n) <= 1e-12 * std::max(1.0, scale * scale);

  const CMatrix b = bc.stacked();
  bool any = false;
  bool pass = true;
  for (int c = 1; c <= 6; ++c) {
    const auto pivot = pivot_columns_for_case(c);
    const CMatrix bp = select_columns(b, pivot);
    if (relative_minor(bp) <= 1e-12) continue;
    const CMatrix k = self_adjoint_residual(bc, pivot);
    const CMatrix e = bp.fullPivLu().solve(select_columns(b, complement(pivot, 4)));
    const double tol = 1e-12 * std::pow(1.0 + max_abs(e), 2);
    const std::array<complex, 4> brackets{k(1, 0), k(0, 1), k(1, 1), k(0, 0)};
    std::vector<int> violated;
    for (int i = 0; i < 4; ++i)
      if (std::abs(brackets[i]) > tol) violated.push_back(i);
    if (!any) {
      report.pivot_case = c;
      report.brackets = brackets;
      report.violated = violated;
      any = true;
    }
    if (!violated.empty()) pass = false;
  }
  if (!any) throw InputError("self-adjointness check: all six pivot minors vanish");
  report.status = pass ? SelfAdjointStatus::Pass : SelfAdjointStatus::Fail;
  return report;
}

}  // namespace detline
