#include "detline/oracle.hpp"

#include "detline/errors.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

namespace detline {

namespace {

using std::numbers::pi;

struct RealBoundary {
  Eigen::Matrix2d m, n;
};

RealBoundary real_boundary(const Problem& p, const BoundarySpec& bc) {
  if (p.components() != 1 || bc.components() != 1)
    throw InputError("eigenvalue scan: scalar problems only (r = 1)");
  if (!p.is_real()) throw InputError("eigenvalue scan: potential must be real");
  if (!bc.is_real()) throw InputError("eigenvalue scan: boundary matrices must be real");
  return {bc.M().real(), bc.N().real()};
}

Eigen::Matrix2d magnus_propagate(const Problem& p, double lambda, int steps) {
  const double h = (p.b() - p.a()) / steps;
  const double g1 = 0.5 - std::sqrt(3.0) / 6.0, g2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double kc = std::sqrt(3.0) / 12.0 * h * h;
  Eigen::Matrix2d hm = Eigen::Matrix2d::Identity();
  for (int s = 0; s < steps; ++s) {
    const double x = p.a() + s * h;
    const double w1 = p.q_scalar(x + g1 * h).real() - lambda;
    const double w2 = p.q_scalar(x + g2 * h).real() - lambda;
    Eigen::Matrix2d omega;
    const double a = kc * (w1 - w2);
    omega << a, h, 0.5 * h * (w1 + w2), -a;
    const double s2 = a * a + h * 0.5 * h * (w1 + w2);
    double c, f;
    if (s2 > 1e-16) {
      const double t = std::sqrt(s2);
      c = std::cosh(t);
      f = std::sinh(t) / t;
    } else if (s2 < -1e-16) {
      const double t = std::sqrt(-s2);
      c = std::cos(t);
      f = std::sin(t) / t;
    } else {
      c = 1.0 + 0.5 * s2;
      f = 1.0 + s2 / 6.0;
    }
    const Eigen::Matrix2d e = c * Eigen::Matrix2d::Identity() + f * omega;
    hm = e * hm;
  }
  return hm;
}

double evaluate(const Problem& p, const BoundarySpec& bc, const RealBoundary& rb, double lambda,
                const ScanOptions& options) {
  if (options.use_runge_kutta)
    return characteristic(bc, propagate_fundamental(p, lambda, options.controls)).real();
  const Eigen::Matrix2d hm = magnus_propagate(p, lambda, options.magnus_steps);
  return (rb.m + rb.n * hm).determinant();
}

int thread_count(const ScanOptions& options) {
  if (options.threads > 0) return options.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates f at every point, spreading the work over a few threads.
template <class F>
std::vector<double> parallel_map(const std::vector<double>& xs, F f, int threads) {
  std::vector<double> out(xs.size());
  const std::size_t chunk = (xs.size() + threads - 1) / threads;
  std::vector<std::future<void>> jobs;
  for (std::size_t start = 0; start < xs.size(); start += chunk) {
    const std::size_t stop = std::min(xs.size(), start + chunk);
    jobs.push_back(std::async(std::launch::async, [&, start, stop] {
      for (std::size_t k = start; k < stop; ++k) out[k] = f(xs[k]);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

struct Bracket {
  double lo, hi, flo, fhi;
};

}  // namespace

double scan_characteristic(const Problem& p, const BoundarySpec& bc, double lambda,
                           const ScanOptions& options) {
  const RealBoundary rb = real_boundary(p, bc);
  return evaluate(p, bc, rb, lambda, options);
}

EigenvalueList eigenvalue_scan(const Problem& p, const BoundarySpec& bc, int count,
                               const ScanOptions& options) {
  if (count < 1) throw InputError("eigenvalue scan: count must be positive");
  if (options.magnus_steps < 16) throw InputError("eigenvalue scan: too few Magnus steps");
  const RealBoundary rb = real_boundary(p, bc);
  const int threads = thread_count(options);
  EigenvalueList out;
  std::atomic<std::size_t> evaluations{0};
  auto f = [&](double lambda) {
    ++evaluations;
    return evaluate(p, bc, rb, lambda, options);
  };

  const double len = p.length();
  const double gap0 = pi * pi / (len * len);
  const double rmin = p.min_diagonal_real();
  const double lo =
      std::isnan(options.lambda_min) ? rmin - 2.0 * gap0 - 1e-3 : options.lambda_min;
  const double hi = std::isnan(options.lambda_max)
                        ? std::max(p.max_diagonal_real(), rmin) +
                              1.5 * (count + 4.0) * (count + 4.0) * gap0 + 10.0 * gap0
                        : options.lambda_max;
  if (!(hi > lo)) throw InputError("eigenvalue scan: empty lambda range");

  auto step_at = [&](double lambda) {
    const double t = lambda - rmin;
    if (t < 10.0 * gap0) return 0.5 * gap0;
    const double n = std::floor(len * std::sqrt(t) / pi);
    return 0.5 * (2.0 * n + 1.0) * gap0;
  };

  std::vector<Bracket> brackets;
  std::vector<double> exact_roots;
  std::vector<double> grid{lo};
  std::vector<double> values{f(lo)};

  auto found = [&] {
    return brackets.size() + exact_roots.size() + 2 * out.suspected_even_roots.size();
  };

  // Looks for roots hidden between grid points around a dip of |f|.
  auto investigate = [&](double a, double fa, double b, double fb) {
    const double scale = std::max(std::abs(fa), std::abs(fb));
    const double sgn = fa > 0 ? 1.0 : -1.0;
    double l = a, fl = fa, r = b, fr = fb;
    for (int depth = 0; depth < 5; ++depth) {
      std::vector<double> xs;
      for (int k = 1; k < 4; ++k) xs.push_back(l + (r - l) * k / 4.0);
      const std::vector<double> fs = parallel_map(xs, f, threads);
      std::vector<double> px{l, xs[0], xs[1], xs[2], r};
      std::vector<double> pf{fl, fs[0], fs[1], fs[2], fr};
      bool any = false;
      for (int k = 0; k < 4; ++k) {
        if (pf[k] * pf[k + 1] < 0) {
          brackets.push_back({px[k], px[k + 1], pf[k], pf[k + 1]});
          any = true;
        } else if (pf[k + 1] == 0.0 && k < 3) {
          exact_roots.push_back(px[k + 1]);
          any = true;
        }
      }
      if (any) return;
      int kmin = 0;
      for (int k = 1; k < 5; ++k)
        if (sgn * pf[k] < sgn * pf[kmin]) kmin = k;
      const int k0 = std::clamp(kmin - 1, 0, 3);
      l = px[k0];
      fl = pf[k0];
      r = px[k0 + 1 < 4 ? k0 + 2 : 4];
      fr = pf[k0 + 1 < 4 ? k0 + 2 : 4];
    }
    // golden-section search for the extremum of sgn * f
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = r - phi * (r - l), x2 = l + phi * (r - l);
    double f1 = sgn * f(x1), f2 = sgn * f(x2);
    while (r - l > 1e-13 * std::max(1.0, std::abs(l))) {
      if (f1 < f2) {
        r = x2;
        x2 = x1;
        f2 = f1;
        x1 = r - phi * (r - l);
        f1 = sgn * f(x1);
      } else {
        l = x1;
        x1 = x2;
        f1 = f2;
        x2 = l + phi * (r - l);
        f2 = sgn * f(x2);
      }
    }
    const double xm = 0.5 * (x1 + x2);
    const double fm = f(xm);
    if (sgn * fm < 0) {
      brackets.push_back({a, xm, fa, fm});
      brackets.push_back({xm, b, fm, fb});
    } else if (sgn * fm <= 1e-6 * scale) {
      out.suspected_even_roots.push_back(xm);
    }
  };

  std::size_t processed = 0;  // grid cells [k, k+1] with k < processed are done
  double lambda = lo;
  while (found() < static_cast<std::size_t>(count)) {
    if (lambda >= hi)
      throw ComputationError(fmt::format(
          "eigenvalue scan: only {} of {} roots below lambda = {:.6g}", found(), count, hi));
    std::vector<double> xs;
    for (int k = 0; k < 8 * threads && lambda < hi; ++k) {
      lambda += step_at(lambda);
      xs.push_back(lambda);
    }
    const std::vector<double> fs = parallel_map(xs, f, threads);
    grid.insert(grid.end(), xs.begin(), xs.end());
    values.insert(values.end(), fs.begin(), fs.end());

    for (; processed + 1 < grid.size(); ++processed) {
      const std::size_t k = processed;
      if (values[k] == 0.0) {
        exact_roots.push_back(grid[k]);
        continue;
      }
      if (values[k] * values[k + 1] < 0) {
        brackets.push_back({grid[k], grid[k + 1], values[k], values[k + 1]});
        continue;
      }
      if (k == 0 || k + 1 >= grid.size() || values[k + 1] == 0.0) continue;
      const double fl = values[k - 1], fm = values[k], fr = values[k + 1];
      if (fl * fm > 0 && std::abs(fm) < std::abs(fl) && std::abs(fm) <= std::abs(fr))
        investigate(grid[k - 1], fl, grid[k + 1], fr);
    }
  }

  std::sort(brackets.begin(), brackets.end(),
            [](const Bracket& x, const Bracket& y) { return x.lo < y.lo; });
  std::vector<std::future<std::pair<double, double>>> jobs;
  std::vector<std::pair<double, double>> roots;
  auto bisect = [&](Bracket br) {
    double a = br.lo, b = br.hi, fa = br.flo;
    while (b - a > 1e-12 * std::max(1.0, std::abs(0.5 * (a + b)))) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double fm = f(m);
      if (fm == 0.0) return std::pair{m, 0.0};
      if (fa * fm < 0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    const double root = 0.5 * (a + b);
    return std::pair{root, std::abs(f(root))};
  };
  for (std::size_t k = 0; k < brackets.size(); k += threads) {
    jobs.clear();
    for (std::size_t j = k; j < std::min(brackets.size(), k + threads); ++j)
      jobs.push_back(std::async(std::launch::async, bisect, brackets[j]));
    for (auto& job : jobs) roots.push_back(job.get());
  }
  for (double x : exact_roots) roots.emplace_back(x, 0.0);

  std::vector<std::size_t> order(roots.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return roots[x].first < roots[y].first; });
  for (std::size_t k : order) {
    const double x = roots[k].first;
    if (!out.values.empty() && x - out.values.back() < 1e-9) continue;
    out.values.push_back(x);
    out.residuals.push_back(roots[k].second);
    if (k < brackets.size()) {
      out.brackets.emplace_back(brackets[k].lo, brackets[k].hi);
      out.scales.push_back(std::max(std::abs(brackets[k].flo), std::abs(brackets[k].fhi)));
    } else {
      out.brackets.emplace_back(x, x);
      out.scales.push_back(0.0);
    }
  }
  std::sort(out.suspected_even_roots.begin(), out.suspected_even_roots.end());

  // keep the lowest `count` roots, even roots counting twice
  std::size_t nv = 0, ne = 0;
  for (int counted = 0; counted < count;) {
    const bool take_value =
        nv < out.values.size() &&
        (ne >= out.suspected_even_roots.size() || out.values[nv] < out.suspected_even_roots[ne]);
    if (take_value) {
      ++nv;
      ++counted;
    } else if (ne < out.suspected_even_roots.size()) {
      ++ne;
      counted += 2;
    } else {
      break;
    }
  }
  out.values.resize(nv);
  out.residuals.resize(nv);
  out.brackets.resize(nv);
  out.scales.resize(nv);
  out.suspected_even_roots.resize(ne);
  out.evaluations = evaluations;
  return out;
}

namespace {

void require_roots(const EigenvalueList& list, int n) {
  if (static_cast<int>(list.values.size()) < n)
    throw ComputationError(
        fmt::format("truncated product: {} simple roots found, {} needed ({} suspected even)",
                    list.values.size(), n, list.suspected_even_roots.size()));
  const double last = list.values[n - 1];
  for (double e : list.suspected_even_roots)
    if (e < last)
      throw ComputationError(fmt::format(
          "truncated product: tangential root near {:.6g}; multiplicity unresolved", e));
}

}  // namespace

double truncated_product_ratio(const EigenvalueList& l1, const EigenvalueList& l2, int n,
                               bool skip_zero) {
  if (n < 1) throw InputError("truncated product: N must be positive");
  require_roots(l1, n);
  require_roots(l2, n);
  const bool zero = std::abs(l1.values[0]) < 1e-6;
  if (skip_zero && !zero)
    throw ComputationError(fmt::format(
        "truncated product: lowest eigenvalue {:.6g} is not a zero mode", l1.values[0]));
  if (!skip_zero && zero)
    throw ComputationError("truncated product: zero eigenvalue present; use skip_zero");
  if (std::abs(l2.values[0]) < 1e-6)
    throw ComputationError("truncated product: reference operator has a zero eigenvalue");

  double ratio = 1.0;
  for (int k = 0; k < n; ++k) {
    const double num = (skip_zero && k == 0) ? 1.0 : l1.values[k];
    ratio *= num / l2.values[k];
  }
  return ratio;
}

double truncated_product_ratio(const Problem& p1, const Problem& p2, const BoundarySpec& bc,
                               int n, bool skip_zero, const ScanOptions& options) {
  if (n < 1) throw InputError("truncated product: N must be positive");
  auto second = std::async(std::launch::async, [&] { return eigenvalue_scan(p2, bc, n, options); });
  const EigenvalueList l1 = eigenvalue_scan(p1, bc, n, options);
  const EigenvalueList l2 = second.get();
  return truncated_product_ratio(l1, l2, n, skip_zero);
}

AiryValues airy_reference(double x) {
  if (!(std::abs(x) <= 6.0)) throw InputError(fmt::format("airy_reference: |x| = {} > 6", x));
  const double c1 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
  const double c2 = 1.0 / (std::pow(3.0, 1.0 / 3.0) * std::tgamma(1.0 / 3.0));
  const double x3 = x * x * x;

  auto series = [&](double first, auto ratio) {
    double term = first, sum = first;
    for (int k = 0; k < 200; ++k) {
      term *= x3 / ratio(k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  };
  const double f = series(1.0, [](int k) { return (3.0 * k + 2) * (3.0 * k + 3); });
  const double g = series(x, [](int k) { return (3.0 * k + 3) * (3.0 * k + 4); });
  const double fp = series(0.5 * x * x, [](int k) { return (3.0 * k + 3) * (3.0 * k + 5); });
  const double gp = series(1.0, [](int k) { return (3.0 * k + 1) * (3.0 * k + 3); });
  const double s3 = std::sqrt(3.0);
  return {c1 * f - c2 * g, s3 * (c1 * f + c2 * g), c1 * fp - c2 * gp, s3 * (c1 * fp + c2 * gp)};
}

CMatrix analytic_fundamental_twisted(double x, double mu, double l) {
  if (!(l > 0.0)) throw InputError("twisted fundamental: l must be positive");
  if (!(3.0 * mu * mu < 1.0)) throw InputError("twisted fundamental: requires mu^2 < 1/3");
  if (x < -0.5 * l - 1e-12 || x > 0.5 * l + 1e-12)
    throw InputError("twisted fundamental: x outside [-l/2, l/2]");
  const complex i(0.0, 1.0);
  const double nu2 = 2.0 * (1.0 - 3.0 * mu * mu);
  const double nu = std::sqrt(nu2);
  const double z = x + 0.5 * l;
  const double sh = std::sinh(nu * z), ch = std::cosh(nu * z);
  const double w = 1.0 - mu * mu;
  const complex ep = std::exp(i * mu * x), em = std::exp(-i * mu * x);
  const complex cp = std::exp(i * mu * l * 0.5) / nu2, cm = std::exp(-i * mu * l * 0.5) / nu2;

  // (F1, F1', F2, F2') per solution; component 1 carries e^{i mu x}, 2 carries e^{-i mu x}
  struct Parts {
    complex c, f1, d1, f2, d2;
  };
  const Parts parts[4] = {
      {cp, nu2 / 2 + i * mu * w * z + nu2 / 2 * ch - i * mu / nu * (3 - 7 * mu * mu) * sh,
       i * mu * w + nu2 * nu / 2 * sh - i * mu * (3 - 7 * mu * mu) * ch,
       w * (-1.0 - i * mu * z + ch + i * mu / nu * sh), w * (-i * mu + nu * sh + i * mu * ch)},
      {cm, w * (-1.0 + i * mu * z + ch - i * mu / nu * sh), w * (i * mu + nu * sh - i * mu * ch),
       nu2 / 2 - i * mu * w * z + nu2 / 2 * ch + i * mu / nu * (3 - 7 * mu * mu) * sh,
       -i * mu * w + nu2 * nu / 2 * sh + i * mu * (3 - 7 * mu * mu) * ch},
      {cp, 2.0 * i * mu + w * z - 2.0 * i * mu * ch + (1 - 5 * mu * mu) / nu * sh,
       w - 2.0 * i * mu * nu * sh + (1 - 5 * mu * mu) * ch, complex(w * (-z + sh / nu)),
       complex(w * (-1 + ch))},
      {cm, complex(w * (-z + sh / nu)), complex(w * (-1 + ch)),
       -2.0 * i * mu + w * z + 2.0 * i * mu * ch + (1 - 5 * mu * mu) / nu * sh,
       w + 2.0 * i * mu * nu * sh + (1 - 5 * mu * mu) * ch},
  };
  CMatrix y(4, 4);
  for (int k = 0; k < 4; ++k) {
    const Parts& s = parts[k];
    y(0, k) = s.c * s.f1 * ep;
    y(1, k) = s.c * s.f2 * em;
    y(2, k) = s.c * (s.d1 + i * mu * s.f1) * ep;
    y(3, k) = s.c * (s.d2 - i * mu * s.f2) * em;
  }
  return y;
}

std::array<std::array<const char*, 2>, 2> twisted_potential_text() {
  return {{{"1 - 2*mu^2", "(1 - mu^2)*exp(2*i*mu*x)"},
           {"(1 - mu^2)*exp(-2*i*mu*x)", "1 - 2*mu^2"}}};
}

}  // namespace detline
