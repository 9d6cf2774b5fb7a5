#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace tubeswarm {

namespace detail {

template <class F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                       int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance tol.
/// Returns a negative value when b < a.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-9, int max_depth = 48) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Adaptive Simpson split at the given (sorted) breakpoints, so each
/// sub-integral sees a smooth integrand.
template <class F>
double piecewise_simpson(const F& f, double a, double b, std::span<const double> breaks, double tol = 1e-9) {
  if (a == b) return 0.0;
  if (b < a) return -piecewise_simpson(f, b, a, breaks, tol);
  auto it = std::upper_bound(breaks.begin(), breaks.end(), a);
  std::size_t pieces = 1;
  for (auto jt = it; jt != breaks.end() && *jt < b; ++jt) ++pieces;
  const double piece_tol = tol / static_cast<double>(pieces);
  double total = 0.0;
  double lo = a;
  for (; it != breaks.end() && *it < b; ++it) {
    total += adaptive_simpson(f, lo, *it, piece_tol);
    lo = *it;
  }
  return total + adaptive_simpson(f, lo, b, piece_tol);
}

}  // namespace tubeswarm
