#pragma once
// Longitudinal small-perturbation plant about level trim, in stability axes.
//
// State ordering: [u, w, q, theta, h]. The plant is
//   xdot = (A + sigma * B_sigma) x
// with B_sigma the morph sensitivity of A, taken by central differences.
//
// Derivative bookkeeping (Q = dynamic pressure, S = wing area, c = chord):
//   Xu = -(QS/(m u0)) (2 CD + CDV)        Xw =  (QS/(m u0)) (CL - CD_alpha)
//   Zu = -(QS/(m u0)) (2 CL + CLV)        Zw = -(QS/(m u0)) (CL_alpha + CD)
//   Mu =  (QSc/(Iyy u0)) (2 Cm + CmV)     Mw =  (QSc/(Iyy u0)) Cm_alpha
//   Mq =  (QSc^2/(2 u0 Iyy)) Cmq          Zq =  u0 (kinematic coupling)
// Coefficients are evaluated at the trim incidence; level trim leaves theta0 = 0
// in stability axes, so the gravity column is [-g, 0, 0, 0, 0]^T.
//
// The altitude row is selectable: the climb-rate form hdot = u0*theta - w is the
// physical default; the range-rate form hdot = u is kept because reference data
// published in that convention should reproduce verbatim.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "plus/polar.hpp"
#include "plus/rootfind.hpp"
#include "plus/synthetic.hpp"

namespace plus::aero {

using Matrix5d = Eigen::Matrix<double, 5, 5>;

struct StabilityDerivatives {
  double Xu = 0.0, Xw = 0.0;
  double Zu = 0.0, Zw = 0.0, Zq = 0.0;
  double Mu = 0.0, Mw = 0.0, Mq = 0.0;
  // morph sensitivities (entries of B_sigma)
  double Xu_s = 0.0, Xw_s = 0.0;
  double Zu_s = 0.0, Zw_s = 0.0;
  double Mu_s = 0.0, Mw_s = 0.0, Mq_s = 0.0;

  double u0 = 0.0;      // trim speed [m/s]
  double gravity = 9.81;
};

enum class HRowConvention { climb_rate, range_rate };

struct PlantMatrices {
  Matrix5d A = Matrix5d::Zero();
  Matrix5d B_sigma = Matrix5d::Zero();
};

inline Matrix5d h_row_applied(Matrix5d a, HRowConvention conv, double u0) {
  a.row(4).setZero();
  if (conv == HRowConvention::climb_rate) {
    a(4, 1) = -1.0;
    a(4, 3) = u0;
  } else {
    a(4, 0) = 1.0;
  }
  return a;
}

inline PlantMatrices assemble_plant(const StabilityDerivatives& d,
                                    HRowConvention conv = HRowConvention::climb_rate) {
  PlantMatrices p;
  p.A << d.Xu, d.Xw, 0.0, -d.gravity, 0.0,
         d.Zu, d.Zw, d.Zq, 0.0, 0.0,
         d.Mu, d.Mw, d.Mq, 0.0, 0.0,
         0.0, 0.0, 1.0, 0.0, 0.0,
         0.0, 0.0, 0.0, 0.0, 0.0;
  p.A = h_row_applied(p.A, conv, d.u0);
  p.B_sigma << d.Xu_s, d.Xw_s, 0.0, 0.0, 0.0,
               d.Zu_s, d.Zw_s, 0.0, 0.0, 0.0,
               d.Mu_s, d.Mw_s, d.Mq_s, 0.0, 0.0,
               0.0, 0.0, 0.0, 0.0, 0.0,
               0.0, 0.0, 0.0, 0.0, 0.0;
  return p;
}

// Reads the speed-axis entries back out of an externally supplied plant.
inline StabilityDerivatives extract_derivatives(const PlantMatrices& p, double gravity = 9.81) {
  StabilityDerivatives d;
  d.Xu = p.A(0, 0); d.Xw = p.A(0, 1);
  d.Zu = p.A(1, 0); d.Zw = p.A(1, 1); d.Zq = p.A(1, 2);
  d.Mu = p.A(2, 0); d.Mw = p.A(2, 1); d.Mq = p.A(2, 2);
  d.Xu_s = p.B_sigma(0, 0); d.Xw_s = p.B_sigma(0, 1);
  d.Zu_s = p.B_sigma(1, 0); d.Zw_s = p.B_sigma(1, 1);
  d.Mu_s = p.B_sigma(2, 0); d.Mw_s = p.B_sigma(2, 1); d.Mq_s = p.B_sigma(2, 2);
  d.u0 = p.A(1, 2);  // kinematic Zq slot carries the trim speed
  d.gravity = gravity;
  return d;
}

struct TrimState {
  double alpha = 0.0;   // trim incidence [rad]
  double thrust = 0.0;  // [N]
};

// Level-flight trim of the synthetic model at sigma = 0: finds the incidence
// where lift balances weight, then thrust from the drag balance.
inline TrimState trim_state(const SyntheticAeroModel& model, const AircraftGeometry& geom,
                            const FlightCondition& cond) {
  geom.validate();
  cond.validate();
  const double qs = cond.dynamic_pressure() * geom.wing_area();
  const double w = geom.mass * cond.gravity;
  auto residual = [&](double a) {
    const CoefficientSet c = model.eval(a, 0.0, 0.0);
    return qs * (c.CL * std::cos(a) + c.CD * std::sin(a)) - w * std::cos(a);
  };
  auto slope = [&](double a) {
    const double h = 1e-6;
    return (residual(a + h) - residual(a - h)) / (2.0 * h);
  };
  const num::RootResult r = num::newton(residual, slope, 0.0, 1e-10 * w, 50);
  if (!r.converged)
    throw std::runtime_error("trim_state: lift balance did not converge (model cannot trim)");
  const CoefficientSet c = model.eval(r.x, 0.0, 0.0);
  const double thrust = qs * (c.CD * std::cos(r.x) - c.CL * std::sin(r.x)) +
                        w * std::sin(r.x);
  return {r.x, thrust};
}

namespace detail {

struct StaticSlice {
  double CL, CD, Cm;          // at the trim incidence
  double CLa, CDa, Cma;       // alpha slopes at trim
  double CLV, CDV, CmV, Cmq;  // speed-ratio slopes and pitch damping
};

inline StabilityDerivatives derivatives_from_slice(
    const StaticSlice& s0, const std::function<StaticSlice(double)>& at, double sigma,
    double fd_step, const AircraftGeometry& geom, const FlightCondition& cond) {
  const double qs = cond.dynamic_pressure() * geom.wing_area();
  const double k1 = qs / (geom.mass * cond.airspeed);
  const double k2 = qs * geom.chord / (geom.inertia_yy * cond.airspeed);

  auto entry = [&](const StaticSlice& s) {
    StabilityDerivatives d;
    d.Xu = -k1 * (2.0 * s.CD + s.CDV);
    d.Xw = k1 * (s.CL - s.CDa);
    d.Zu = -k1 * (2.0 * s.CL + s.CLV);
    d.Zw = -k1 * (s.CLa + s.CD);
    d.Zq = cond.airspeed;
    d.Mu = k2 * (2.0 * s.Cm + s.CmV);
    d.Mw = k2 * s.Cma;
    d.Mq = qs * geom.chord * geom.chord * s.Cmq / (2.0 * cond.airspeed * geom.inertia_yy);
    return d;
  };

  StabilityDerivatives d = entry(s0);
  const StabilityDerivatives dp = entry(at(sigma + fd_step));
  const StabilityDerivatives dm = entry(at(sigma - fd_step));
  const double inv = 1.0 / (2.0 * fd_step);
  d.Xu_s = (dp.Xu - dm.Xu) * inv;
  d.Xw_s = (dp.Xw - dm.Xw) * inv;
  d.Zu_s = (dp.Zu - dm.Zu) * inv;
  d.Zw_s = (dp.Zw - dm.Zw) * inv;
  d.Mu_s = (dp.Mu - dm.Mu) * inv;
  d.Mw_s = (dp.Mw - dm.Mw) * inv;
  d.Mq_s = (dp.Mq - dm.Mq) * inv;
  d.u0 = cond.airspeed;
  d.gravity = cond.gravity;
  return d;
}

}  // namespace detail

// Derivatives of the synthetic model about morph state sigma, trim held at the
// sigma = 0 level-flight point. fd_step is the central-difference step for the
// morph sensitivities.
inline StabilityDerivatives derive_stability_matrices(const SyntheticAeroModel& model,
                                                      const AircraftGeometry& geom,
                                                      const FlightCondition& cond,
                                                      double sigma = 0.0,
                                                      double fd_step = 0.01) {
  if (!(fd_step > 0.0))
    throw std::invalid_argument("derive_stability_matrices: fd_step must be positive");
  const double alpha0 = trim_state(model, geom, cond).alpha;
  auto slice = [&](double s) {
    const CoefficientSet c = model.eval(alpha0, 0.0, s);
    detail::StaticSlice sl;
    sl.CL = c.CL; sl.CD = c.CD; sl.Cm = c.Cm;
    sl.CLa = model.cl_alpha(s);
    sl.CDa = model.cd_alpha(s, alpha0);
    sl.Cma = model.cm_alpha(s);
    sl.CLV = model.params().CLV;
    sl.CDV = model.params().CDV;
    sl.CmV = model.params().CmV;
    sl.Cmq = model.cm_q(s);
    return sl;
  };
  return detail::derivatives_from_slice(slice(sigma), slice, sigma, fd_step, geom, cond);
}

// Speed-ratio slopes and pitch damping cannot come from a static (sigma, alpha)
// polar, so table-driven derivation takes them as side constants.
struct AuxiliaryDerivatives {
  double CLV = 0.0, CDV = 0.0, CmV = 0.0;
  double Cmq = 0.0;
  double Cmq_mu = 0.0;  // morph slope of Cmq
};

enum class SlopeFit { central_difference, five_point_least_squares };

namespace detail {

inline double table_alpha_slope(const PolarTable& t, double sigma, double alpha, int which,
                                SlopeFit fit) {
  const auto& ax = t.alpha_axis();
  const double h = ax[1] - ax[0];
  auto val = [&](double a) {
    return which == 0 ? t.interpolate(sigma, a).CL
         : which == 1 ? t.interpolate(sigma, a).CD
                      : t.interpolate(sigma, a).Cm;
  };
  if (fit == SlopeFit::central_difference) {
    const double lo = std::max(alpha - h, ax.front());
    const double hi = std::min(alpha + h, ax.back());
    return (val(hi) - val(lo)) / (hi - lo);
  }
  // least-squares line through 5 samples centered on alpha, clamped to the axis
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = -2; k <= 2; ++k) {
    const double a = std::clamp(alpha + k * h, ax.front(), ax.back());
    sx += a; sy += val(a); sxx += a * a; sxy += a * val(a);
  }
  return (5.0 * sxy - sx * sy) / (5.0 * sxx - sx * sx);
}

}  // namespace detail

// Table-driven derivation. Trim incidence must be supplied (the table knows
// nothing about mass); morph sensitivities use one sigma-grid interval.
inline StabilityDerivatives derive_stability_matrices(const PolarTable& table,
                                                      const AuxiliaryDerivatives& aux,
                                                      const AircraftGeometry& geom,
                                                      const FlightCondition& cond,
                                                      double alpha0, double sigma = 0.0,
                                                      SlopeFit fit = SlopeFit::central_difference) {
  const auto& sax = table.sigma_axis();
  const double hs = sax[1] - sax[0];
  auto slice = [&](double s) {
    const CoefficientSet c = table.interpolate(s, alpha0);
    detail::StaticSlice sl;
    sl.CL = c.CL; sl.CD = c.CD; sl.Cm = c.Cm;
    sl.CLa = detail::table_alpha_slope(table, s, alpha0, 0, fit);
    sl.CDa = detail::table_alpha_slope(table, s, alpha0, 1, fit);
    sl.Cma = detail::table_alpha_slope(table, s, alpha0, 2, fit);
    sl.CLV = aux.CLV; sl.CDV = aux.CDV; sl.CmV = aux.CmV;
    sl.Cmq = aux.Cmq + aux.Cmq_mu * s;
    return sl;
  };
  double step = hs;
  if (sigma + step > sax.back() || sigma - step < sax.front())
    step = std::min(sigma - sax.front(), sax.back() - sigma);
  if (!(step > 0.0))
    throw std::domain_error("derive_stability_matrices: sigma at the table edge");
  return detail::derivatives_from_slice(slice(sigma), slice, sigma, step, geom, cond);
}

}  // namespace plus::aero
