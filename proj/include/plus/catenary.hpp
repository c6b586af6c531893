#pragma once
// Catenary span geometry for overhead-line profiles.
//
// Conventions:
//   - x is the span-local along-track coordinate, x in [0, L], towers at both ends.
//   - raw_ordinate(x) = a*cosh((x - L/2)/a) is the textbook catenary measured from
//     its own origin: minimum a at midspan, largest at the towers.
//   - sag_depth = sag_fraction * span_length, and the solved parameter a satisfies
//     a*(cosh(L/(2a)) - 1) = sag_depth.
//   - Ground-referenced wire height puts the attachment points at tower height H
//     with the sag hanging below: height = H - sag_depth + (raw_ordinate(x) - a).
//   - local_spatial_frequency(x) = x / raw_ordinate(x) [rad/m], zero at x = 0 by
//     convention (the expression itself vanishes there).

#include <cmath>
#include <stdexcept>
#include <string>

#include "plus/rootfind.hpp"

namespace plus::env {

struct CatenarySpec {
  double a = 0.0;             // catenary parameter [m]
  double span_length = 0.0;   // tower spacing L [m]
  double tower_height = 0.0;  // attachment height H above ground [m]
  double sag_fraction = 0.0;  // sag_depth / span_length

  double sag_depth() const { return sag_fraction * span_length; }

  void validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("CatenarySpec: a must be positive");
    if (!(span_length > 0.0))
      throw std::invalid_argument("CatenarySpec: span_length must be positive");
    if (!(sag_fraction > 0.0))
      throw std::invalid_argument("CatenarySpec: sag_fraction must be positive");
    if (!(tower_height > sag_depth()))
      throw std::invalid_argument("CatenarySpec: tower_height must exceed sag depth");
  }
};

inline void require_in_span(const CatenarySpec& s, double x) {
  if (!std::isfinite(x) || x < 0.0 || x > s.span_length)
    throw std::domain_error("catenary: x = " + std::to_string(x) +
                            " outside span [0, " + std::to_string(s.span_length) + "]");
}

inline double raw_ordinate(const CatenarySpec& s, double x) {
  require_in_span(s, x);
  return s.a * std::cosh((x - 0.5 * s.span_length) / s.a);
}

inline double height_above_ground(const CatenarySpec& s, double x) {
  return s.tower_height - s.sag_depth() + (raw_ordinate(s, x) - s.a);
}

// Radius of curvature R(x) = a*cosh^2((x - L/2)/a); minimal (= a) at midspan.
inline double curvature_radius(const CatenarySpec& s, double x) {
  require_in_span(s, x);
  const double c = std::cosh((x - 0.5 * s.span_length) / s.a);
  return s.a * c * c;
}

inline double local_spatial_frequency(const CatenarySpec& s, double x) {
  require_in_span(s, x);
  if (x == 0.0) return 0.0;
  return x / raw_ordinate(s, x);
}

// Solves a*(cosh(L/(2a)) - 1) = sag_fraction*L for the catenary parameter, by
// Newton from the parabolic-approximation guess a0 = L/(8*sag_fraction).
// The residual is monotone decreasing in a, so the iteration is well behaved.
inline CatenarySpec solve_catenary_from_sag(double span_length, double sag_fraction,
                                            double tower_height) {
  if (!(span_length > 0.0))
    throw std::invalid_argument("solve_catenary_from_sag: span_length must be positive");
  if (!(sag_fraction > 0.0) || !(sag_fraction < 1.0))
    throw std::invalid_argument("solve_catenary_from_sag: sag_fraction must be in (0, 1)");

  const double sag = sag_fraction * span_length;
  const double tol = 1e-9 * span_length;
  auto residual = [&](double a) { return a * (std::cosh(span_length / (2.0 * a)) - 1.0) - sag; };
  auto slope = [&](double a) {
    const double u = span_length / (2.0 * a);
    return std::cosh(u) - u * std::sinh(u) - 1.0;
  };

  const double a0 = span_length / (8.0 * sag_fraction);
  const num::RootResult r = num::newton(residual, slope, a0, tol, 100);
  if (!r.converged)
    throw std::runtime_error("solve_catenary_from_sag: no convergence after 100 iterations"
                             " (L = " + std::to_string(span_length) +
                             ", sag_fraction = " + std::to_string(sag_fraction) + ")");

  CatenarySpec spec{r.x, span_length, tower_height, sag_fraction};
  spec.validate();
  return spec;
}

}  // namespace plus::env
