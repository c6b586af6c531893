#pragma once
// Static aerodynamic coefficient model and force/moment evaluation.
//
// Coefficient structure: each of CL, CD, Cm is affine in the speed ratio dV/V
// and in the morphing input mu; CD alone carries a quadratic alpha term.
// alpha is in radians throughout.

#include <cmath>
#include <stdexcept>

namespace plus::aero {

struct AeroCoefficients {
  double CL0 = 0.0, CLa = 0.0, CLV = 0.0, CLmu = 0.0;
  double CD0 = 0.0, CDa = 0.0, CDa2 = 0.0, CDV = 0.0, CDmu = 0.0;
  double Cm0 = 0.0, Cma = 0.0, CmV = 0.0, Cmmu = 0.0;
};

struct CoefficientSet {
  double CL = 0.0, CD = 0.0, Cm = 0.0;
};

struct AircraftGeometry {
  double span = 0.0;        // b [m]
  double chord = 0.0;       // c [m]
  double mass = 0.0;        // [kg]
  double inertia_yy = 0.0;  // [kg m^2]

  double wing_area() const { return span * chord; }
  double aspect_ratio() const { return span / chord; }

  void validate() const {
    if (!(span > 0.0) || !(chord > 0.0))
      throw std::invalid_argument("AircraftGeometry: span and chord must be positive");
    if (!(mass > 0.0) || !(inertia_yy > 0.0))
      throw std::invalid_argument("AircraftGeometry: mass and inertia_yy must be positive");
  }
};

struct FlightCondition {
  double airspeed = 0.0;     // trim speed u0 [m/s]
  double air_density = 1.225;
  double gravity = 9.81;

  double dynamic_pressure() const { return 0.5 * air_density * airspeed * airspeed; }

  void validate() const {
    if (!(airspeed > 0.0))
      throw std::invalid_argument("FlightCondition: airspeed must be positive");
    if (!(air_density > 0.0))
      throw std::invalid_argument("FlightCondition: air_density must be positive");
  }
};

inline CoefficientSet eval_coefficients(const AeroCoefficients& c, double alpha,
                                        double dv_over_v, double mu) {
  if (!std::isfinite(alpha) || !std::isfinite(dv_over_v) || !std::isfinite(mu))
    throw std::invalid_argument("eval_coefficients: non-finite input");
  CoefficientSet out;
  out.CL = c.CL0 + c.CLa * alpha + c.CLV * dv_over_v + c.CLmu * mu;
  out.CD = c.CD0 + c.CDa * alpha + c.CDa2 * alpha * alpha + c.CDV * dv_over_v + c.CDmu * mu;
  out.Cm = c.Cm0 + c.Cma * alpha + c.CmV * dv_over_v + c.Cmmu * mu;
  return out;
}

struct DimensionalForces {
  double lift = 0.0;            // [N]
  double drag = 0.0;            // [N]
  double pitching_moment = 0.0; // [N m]
};

inline DimensionalForces dimensional_forces(const CoefficientSet& cs, double air_density,
                                            double airspeed, double wing_area, double chord) {
  if (!(airspeed > 0.0)) throw std::invalid_argument("dimensional_forces: airspeed must be positive");
  if (!(air_density > 0.0) || !(wing_area > 0.0) || !(chord > 0.0))
    throw std::invalid_argument("dimensional_forces: density, area and chord must be positive");
  if (!std::isfinite(cs.CL) || !std::isfinite(cs.CD) || !std::isfinite(cs.Cm))
    throw std::invalid_argument("dimensional_forces: non-finite coefficients");
  const double qs = 0.5 * air_density * airspeed * airspeed * wing_area;
  return {qs * cs.CL, qs * cs.CD, qs * chord * cs.Cm};
}

// Rigid-body rotational equations augmented with the span-extension terms of a
// telescoping wing: each wing carries a strip of mass strip_mass at lateral
// offset y0 + dy moving outward at rate dy_rate.
struct SpanMorphState {
  double p = 0.0, q = 0.0, r = 0.0;           // body rates [rad/s]
  double p_dot = 0.0, q_dot = 0.0, r_dot = 0.0;
  double ixx = 0.0, iyy = 0.0, izz = 0.0;     // baseline inertias [kg m^2]
  double strip_mass = 0.0;                    // per-wing moving mass [kg]
  double y0 = 0.0;                            // strip offset at zero extension [m]
  double dy = 0.0;                            // current extension [m]
  double dy_rate = 0.0;                       // extension rate [m/s]
};

struct BodyMoments {
  double roll = 0.0, pitch = 0.0, yaw = 0.0;  // [N m]
};

inline BodyMoments span_morph_moments(const SpanMorphState& s) {
  BodyMoments m;
  const double migration = 2.0 * s.strip_mass * s.dy_rate * (s.y0 + s.dy);
  m.roll = s.p_dot * s.ixx + s.q * s.r * (s.izz - s.iyy) + migration * s.p;
  m.pitch = s.q_dot * s.iyy + s.r * s.q * (s.ixx - s.izz);
  m.yaw = s.r_dot * s.izz + s.p * s.q * (s.iyy - s.ixx) + migration * s.r;
  return m;
}

}  // namespace plus::aero
