#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "edfq/errors.hpp"

namespace edfq::num {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * abs_tol) return left + right + delta / 15.0;
  if (depth <= 0) throw QuadratureNonConvergence("adaptive Simpson depth exhausted");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance abs_tol.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 48) {
  if (!(a <= b)) throw std::invalid_argument("adaptive_simpson: a > b");
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Root of a continuous f on [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol = 1e-10, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw BracketNotFound("bisect: no sign change on interval");
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Boundary point of a monotone predicate on [lo, hi]: pred holds on [lo, x) and
// fails on (x, hi]. Returns hi if pred holds everywhere, lo if nowhere.
template <class P>
double bisect_boundary(P&& pred, double lo, double hi, double x_tol = 1e-11, int max_iter = 200) {
  if (!pred(lo)) return lo;
  if (pred(hi)) return hi;
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace edfq::num
