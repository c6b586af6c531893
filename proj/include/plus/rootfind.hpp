#pragma once
// Scalar root finding and line minimization used across the solvers:
// damped-free Newton-Raphson, bracketed bisection, and golden-section search.

#include <cmath>
#include <stdexcept>
#include <string>

namespace plus::num {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Newton iteration on f with derivative df. Converged when |f(x)| < tol.
// Returns converged=false (never throws) so callers can fall back.
template <class F, class DF>
RootResult newton(F&& f, DF&& df, double x0, double tol, int max_iter) {
  double x = x0;
  double fx = f(x);
  for (int i = 0; i < max_iter; ++i) {
    if (std::abs(fx) < tol) return {x, fx, i, true};
    const double d = df(x);
    if (d == 0.0 || !std::isfinite(d)) return {x, fx, i, false};
    const double xn = x - fx / d;
    if (!std::isfinite(xn)) return {x, fx, i, false};
    x = xn;
    fx = f(x);
  }
  const bool ok = std::abs(fx) < tol;
  return {x, fx, max_iter, ok};
}

// Bisection on [lo, hi]; f(lo) and f(hi) must have opposite signs.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::invalid_argument("bisect: no sign change on bracket");
  // orient so that f < 0 at the low end of the search
  double xl = lo, xh = hi;
  if (flo > 0.0) { xl = hi; xh = lo; }
  for (int i = 0; i < max_iter; ++i) {
    const double xm = 0.5 * (xl + xh);
    const double fm = f(xm);
    if (fm <= 0.0) xl = xm; else xh = xm;
    if (std::abs(xh - xl) < xtol) return {0.5 * (xl + xh), f(0.5 * (xl + xh)), i + 1, true};
  }
  const double xm = 0.5 * (xl + xh);
  return {xm, f(xm), max_iter, false};
}

// Golden-section minimization of a unimodal f on [lo, hi].
// Stops when the bracket shrinks below xtol; returns the bracket midpoint.
template <class F>
double golden_min(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace plus::num
