#include "detline/problem.hpp"

#include "detline/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace detline {

Potential::Potential(int components, std::vector<expr::Expression> row_major)
    : r_(components), entries_(std::move(row_major)) {
  if (r_ < 1) throw InputError("potential: component count must be at least 1");
  if (entries_.size() != static_cast<std::size_t>(r_ * r_))
    throw InputError(fmt::format("potential: expected {} entries for a {}x{} matrix, got {}",
                                 r_ * r_, r_, r_, entries_.size()));
  for (const auto& e : entries_)
    if (e.empty()) throw InputError("potential: empty entry");
}

Potential Potential::scalar(std::string_view text) { return Potential(1, {expr::parse(text)}); }

Potential Potential::matrix(const std::vector<std::vector<std::string>>& rows) {
  const int r = static_cast<int>(rows.size());
  std::vector<expr::Expression> entries;
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != r)
      throw InputError(fmt::format("potential: row {} has {} entries, expected {}", i,
                                   rows[i].size(), r));
    for (const auto& text : rows[i]) entries.push_back(expr::parse(text));
  }
  return Potential(r, std::move(entries));
}

bool Potential::depends_on_x() const {
  for (const auto& e : entries_)
    if (e.depends_on_x()) return true;
  return false;
}

void Potential::evaluate(double x, const ParamMap& params, CMatrix& out) const {
  out.resize(r_, r_);
  for (int i = 0; i < r_; ++i) {
    for (int j = 0; j < r_; ++j) {
      try {
        out(i, j) = entries_[i * r_ + j].evaluate(x, params);
      } catch (const expr::EvalError& e) {
        throw InputError(fmt::format("potential entry ({}, {}) at x = {}: {}", i, j, x, e.what()));
      }
    }
  }
}

complex Potential::evaluate_scalar(double x, const ParamMap& params) const {
  try {
    return entries_[0].evaluate(x, params);
  } catch (const expr::EvalError& e) {
    throw InputError(fmt::format("potential at x = {}: {}", x, e.what()));
  }
}

Problem::Problem(double a, double b, Potential potential, ParamMap params)
    : a_(a), b_(b), potential_(std::move(potential)), params_(std::move(params)) {
  if (!std::isfinite(a_) || !std::isfinite(b_) || !(a_ < b_))
    throw InputError(fmt::format("problem: interval [{}, {}] must satisfy a < b", a_, b_));
  if (potential_.components() < 1) throw InputError("problem: potential is empty");
  const int r = potential_.components();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (const auto& name : potential_.entry(i, j).parameters())
        if (!params_.contains(name))
          throw InputError(fmt::format("problem: parameter '{}' is not bound", name));

  constexpr int kSamples = 257;
  CMatrix q;
  for (int s = 0; s < kSamples; ++s) {
    const double x = a_ + (b_ - a_) * s / (kSamples - 1);
    potential_.evaluate(x, params_, q);
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      const complex v = q.data()[k];
      if (std::abs(v.imag()) > 1e-13 * (1.0 + std::abs(v))) real_ = false;
    }
  }
  if (!potential_.depends_on_x()) {
    constant_ = true;
    potential_.evaluate(a_, params_, constant_value_);
  }
}

Problem Problem::scalar(double a, double b, std::string_view potential, ParamMap params) {
  return Problem(a, b, Potential::scalar(potential), std::move(params));
}

void Problem::q(double x, CMatrix& out) const {
  if (constant_) {
    out = constant_value_;
    return;
  }
  potential_.evaluate(x, params_, out);
}

CMatrix Problem::q(double x) const {
  CMatrix out;
  q(x, out);
  return out;
}

complex Problem::q_scalar(double x) const {
  if (constant_) return constant_value_(0, 0);
  return potential_.evaluate_scalar(x, params_);
}

double Problem::min_diagonal_real(int samples) const {
  double best = std::numeric_limits<double>::infinity();
  CMatrix m;
  for (int s = 0; s < samples; ++s) {
    q(a_ + (b_ - a_) * s / (samples - 1), m);
    for (int i = 0; i < components(); ++i) best = std::min(best, m(i, i).real());
  }
  return best;
}

double Problem::max_diagonal_real(int samples) const {
  double best = -std::numeric_limits<double>::infinity();
  CMatrix m;
  for (int s = 0; s < samples; ++s) {
    q(a_ + (b_ - a_) * s / (samples - 1), m);
    for (int i = 0; i < components(); ++i) best = std::max(best, m(i, i).real());
  }
  return best;
}

}  // namespace detline
