#pragma once

#include "detline/expr.hpp"
#include "detline/linalg.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace detline {

using expr::ParamMap;

// r x r matrix of expressions Q(x); r = 1 is the scalar potential R(x).
class Potential {
 public:
  Potential() = default;
  Potential(int components, std::vector<expr::Expression> row_major);

  static Potential scalar(std::string_view text);
  static Potential matrix(const std::vector<std::vector<std::string>>& rows);

  int components() const { return r_; }
  const expr::Expression& entry(int i, int j) const { return entries_[i * r_ + j]; }
  bool depends_on_x() const;

  // Throws InputError carrying the location when an entry fails to evaluate.
  void evaluate(double x, const ParamMap& params, CMatrix& out) const;
  complex evaluate_scalar(double x, const ParamMap& params) const;

 private:
  int r_ = 0;
  std::vector<expr::Expression> entries_;
};

// L = -d^2/dx^2 + Q(x) on [a, b].
class Problem {
 public:
  Problem(double a, double b, Potential potential, ParamMap params = {});

  static Problem scalar(double a, double b, std::string_view potential, ParamMap params = {});

  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }
  int components() const { return potential_.components(); }
  const Potential& potential() const { return potential_; }
  const ParamMap& params() const { return params_; }

  // True when every potential value sampled on the interval is real.
  bool is_real() const { return real_; }

  void q(double x, CMatrix& out) const;
  CMatrix q(double x) const;
  complex q_scalar(double x) const;

  // Smallest real part of the diagonal of Q over a uniform sample.
  double min_diagonal_real(int samples = 257) const;
  double max_diagonal_real(int samples = 257) const;

 private:
  double a_;
  double b_;
  Potential potential_;
  ParamMap params_;
  bool real_ = true;
  // Cached value of an x-independent potential.
  bool constant_ = false;
  CMatrix constant_value_;
};

}  // namespace detline
