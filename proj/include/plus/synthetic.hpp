#pragma once
// Synthetic section-coefficient model for morphing-wing studies.
//
// The model is a thin-airfoil-style baseline plus per-coefficient morph
// sensitivities. A morph input sigma scales each sensitivity slope by
// (1 + growth*sigma), so the contribution of sigma to a coefficient is
//   slope * sigma * (1 + growth * sigma).
// growth > 0 makes thickening more effective than thinning, which is what
// thicker sections do; growth = 0 gives a model exactly affine in sigma.
// All constants are plain data so calibrated sets can be shipped in configs.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "plus/aero.hpp"

namespace plus::aero {

enum class MorphMode { thickness, camber };

// Four-digit-style section family: camber (fraction of chord), camber position
// (tenths of chord), thickness (fraction of chord).
struct AirfoilFamily {
  double camber = 0.02;
  double camber_position = 0.4;
  double thickness = 0.12;

  // "2412" -> camber 0.02, position 0.4, thickness 0.12
  static AirfoilFamily parse(const std::string& code) {
    if (code.size() != 4) throw std::invalid_argument("AirfoilFamily: want a 4-digit code");
    for (char ch : code)
      if (ch < '0' || ch > '9') throw std::invalid_argument("AirfoilFamily: non-digit in code");
    AirfoilFamily f;
    f.camber = (code[0] - '0') / 100.0;
    f.camber_position = (code[1] - '0') / 10.0;
    f.thickness = ((code[2] - '0') * 10 + (code[3] - '0')) / 100.0;
    if (!(f.thickness > 0.0)) throw std::invalid_argument("AirfoilFamily: zero thickness");
    return f;
  }
};

struct SyntheticModelParams {
  MorphMode mode = MorphMode::thickness;
  AirfoilFamily family{};

  double alpha_zero_lift = -0.035;  // [rad]
  double CLV = 0.0;
  double CD0 = 0.02, CDa = 0.0, CDa2 = 1.0, CDV = 0.0;
  double Cm0 = 0.0, Cma = -0.6, CmV = 0.0, Cmq = -12.0;

  // morph sensitivity slopes, per unit sigma
  double CL0_mu = 1.0, CLa_mu = 0.0;
  double CD0_mu = 0.1, CDa_mu = 0.0;
  double Cm0_mu = 0.0, Cma_mu = 0.0;
  double Cmq_mu = 0.0;

  double sensitivity_growth = 0.0;  // slope scaling (1 + growth*sigma)

  // Relative morph envelope implied by the section family: 06..16 thickness
  // codes for thickness morphing, 1..4 camber codes for camber morphing.
  double sigma_min() const {
    return mode == MorphMode::thickness ? (0.06 - family.thickness) / family.thickness
                                        : (0.01 - family.camber) / family.camber;
  }
  double sigma_max() const {
    return mode == MorphMode::thickness ? (0.16 - family.thickness) / family.thickness
                                        : (0.04 - family.camber) / family.camber;
  }

  // Plausible generic defaults for a four-digit section; slope heuristics only.
  static SyntheticModelParams thin_airfoil_defaults(const AirfoilFamily& f, MorphMode mode) {
    SyntheticModelParams p;
    p.mode = mode;
    p.family = f;
    p.alpha_zero_lift = -1.8 * f.camber * 100.0 * (std::numbers::pi / 180.0) / 2.0;
    p.CD0 = 0.018 + 0.05 * f.thickness;
    p.Cma = -0.6;
    p.Cmq = -12.0;
    if (mode == MorphMode::thickness) {
      p.CL0_mu = 0.3;
      p.CD0_mu = 0.08;
      p.Cm0_mu = 0.05;
    } else {
      p.CL0_mu = 1.2;
      p.CD0_mu = 0.02;
      p.Cm0_mu = -0.25;
    }
    return p;
  }
};

// Section model bound to a planform: lift slope carries the usual finite-span
// correction 2*pi*AR/(AR + 2).
class SyntheticAeroModel {
 public:
  SyntheticAeroModel(SyntheticModelParams params, const AircraftGeometry& geom)
      : p_(std::move(params)) {
    geom.validate();
    const double ar = geom.aspect_ratio();
    cla_ = 2.0 * std::numbers::pi * ar / (ar + 2.0);
    cl0_ = -cla_ * p_.alpha_zero_lift;
  }

  const SyntheticModelParams& params() const { return p_; }
  double lift_slope() const { return cla_; }

  double morph_gain(double sigma) const { return sigma * (1.0 + p_.sensitivity_growth * sigma); }

  CoefficientSet eval(double alpha, double dv_over_v, double sigma) const {
    if (!std::isfinite(alpha) || !std::isfinite(dv_over_v) || !std::isfinite(sigma))
      throw std::invalid_argument("SyntheticAeroModel::eval: non-finite input");
    const double g = morph_gain(sigma);
    CoefficientSet out;
    out.CL = (cl0_ + p_.CL0_mu * g) + (cla_ + p_.CLa_mu * g) * alpha + p_.CLV * dv_over_v;
    out.CD = (p_.CD0 + p_.CD0_mu * g) + (p_.CDa + p_.CDa_mu * g) * alpha +
             p_.CDa2 * alpha * alpha + p_.CDV * dv_over_v;
    out.Cm = (p_.Cm0 + p_.Cm0_mu * g) + (p_.Cma + p_.Cma_mu * g) * alpha + p_.CmV * dv_over_v;
    return out;
  }

  // Alpha slopes at a morph state (relevant for stability derivatives).
  double cl_alpha(double sigma) const { return cla_ + p_.CLa_mu * morph_gain(sigma); }
  double cd_alpha(double sigma, double alpha) const {
    return p_.CDa + p_.CDa_mu * morph_gain(sigma) + 2.0 * p_.CDa2 * alpha;
  }
  double cm_alpha(double sigma) const { return p_.Cma + p_.Cma_mu * morph_gain(sigma); }
  double cm_q(double sigma) const { return p_.Cmq + p_.Cmq_mu * morph_gain(sigma); }

  // Local tangent of the model at a morph state, as the plain affine
  // coefficient set: eval_coefficients(tangent_at(s), a, v, m) linearizes the
  // model about sigma = s for small additional morph m.
  AeroCoefficients tangent_at(double sigma) const {
    const double g = morph_gain(sigma);
    const double dg = 1.0 + 2.0 * p_.sensitivity_growth * sigma;  // d(morph_gain)/d(sigma)
    AeroCoefficients c;
    c.CL0 = cl0_ + p_.CL0_mu * g;
    c.CLa = cla_ + p_.CLa_mu * g;
    c.CLV = p_.CLV;
    c.CLmu = p_.CL0_mu * dg;
    c.CD0 = p_.CD0 + p_.CD0_mu * g;
    c.CDa = p_.CDa + p_.CDa_mu * g;
    c.CDa2 = p_.CDa2;
    c.CDV = p_.CDV;
    c.CDmu = p_.CD0_mu * dg;
    c.Cm0 = p_.Cm0 + p_.Cm0_mu * g;
    c.Cma = p_.Cma + p_.Cma_mu * g;
    c.CmV = p_.CmV;
    c.Cmmu = p_.Cm0_mu * dg;
    return c;
  }

 private:
  SyntheticModelParams p_;
  double cla_ = 0.0;
  double cl0_ = 0.0;
};

}  // namespace plus::aero
