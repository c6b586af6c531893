#pragma once
// Fixed-step RK4 integration of the morph-scheduled longitudinal dynamics
//   vdot = (A + sigma(x) * B_sigma) v,   xdot = u0 + u
// over a multi-span wire profile, plus the tracking figures of merit.
//
// sigma is frozen over each step at the value looked up (and optionally
// servo-filtered) at the step-start position, making each step an exact
// linear-system substep under the zero-order-hold command.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plus/actuator.hpp"
#include "plus/controller.hpp"
#include "plus/csv.hpp"
#include "plus/powerline.hpp"
#include "plus/stability.hpp"

namespace plus::sim {

using Vector5d = Eigen::Matrix<double, 5, 1>;

struct TrajectorySample {
  double t = 0.0;   // absolute time [s]
  double x = 0.0;   // along-track position [m]
  double u = 0.0, w = 0.0, q = 0.0, theta = 0.0, h = 0.0;
  double sigma_cmd = 0.0;       // schedule output
  double sigma_achieved = 0.0;  // after the actuator, if any

  Vector5d state() const {
    Vector5d v;
    v << u, w, q, theta, h;
    return v;
  }
};

using Trajectory = std::vector<TrajectorySample>;

struct SimConfig {
  double dt = 1e-3;            // [s]
  double u0 = 25.0;            // trim speed [m/s]
  double x_end = 0.0;          // integrate until x >= x_end [m]
  double start_x = 0.0;
  double start_t = 0.0;
  Vector5d initial_state = Vector5d::Zero();
  double divergence_bound = 1e4;   // abort when any |component| exceeds this
  double stall_time_factor = 10.0; // abort when t exceeds factor * span time

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (!(u0 > 0.0)) throw std::invalid_argument("SimConfig: u0 must be positive");
    if (!(x_end > start_x)) throw std::invalid_argument("SimConfig: x_end must exceed start_x");
    if (!(divergence_bound > 0.0))
      throw std::invalid_argument("SimConfig: divergence_bound must be positive");
    if (!initial_state.allFinite())
      throw std::invalid_argument("SimConfig: initial state must be finite");
  }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t, double x)
      : std::runtime_error(what + " (t = " + std::to_string(t) +
                           " s, x = " + std::to_string(x) + " m)"),
        t_(t), x_(x) {}
  double time() const { return t_; }
  double position() const { return x_; }

 private:
  double t_, x_;
};

// One RK4 step of the frozen-sigma augmented system; returns the new (v, x).
inline void rk4_step(const aero::Matrix5d& m, double u0, double dt, Vector5d& v, double& x) {
  auto fx = [u0](const Vector5d& s) { return u0 + s(0); };
  const Vector5d k1 = m * v;
  const double l1 = fx(v);
  const Vector5d v2 = v + 0.5 * dt * k1;
  const Vector5d k2 = m * v2;
  const double l2 = fx(v2);
  const Vector5d v3 = v + 0.5 * dt * k2;
  const Vector5d k3 = m * v3;
  const double l3 = fx(v3);
  const Vector5d v4 = v + dt * k3;
  const Vector5d k4 = m * v4;
  const double l4 = fx(v4);
  v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  x += (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
}

using SigmaProvider = std::function<double(double x)>;

// Integrates from cfg.start_x until x >= cfg.x_end. A null actuator means the
// command is applied directly (ideal morphing). Time and position accumulate
// additively, so a run split at any sample and resumed from it reproduces the
// unsplit run bit for bit (the actuator object carries its own state across
// the split).
inline Trajectory integrate(const aero::PlantMatrices& plant, const SigmaProvider& schedule,
                            act::Actuator* servo, const SimConfig& cfg) {
  cfg.validate();
  Vector5d v = cfg.initial_state;
  double x = cfg.start_x;
  double t = cfg.start_t;
  const double t_limit =
      cfg.start_t + cfg.stall_time_factor * (cfg.x_end - cfg.start_x) / cfg.u0;

  Trajectory out;
  out.reserve(static_cast<std::size_t>((cfg.x_end - cfg.start_x) / (cfg.u0 * cfg.dt)) + 16);

  auto record = [&](double cmd, double ach) {
    TrajectorySample s;
    s.t = t; s.x = x;
    s.u = v(0); s.w = v(1); s.q = v(2); s.theta = v(3); s.h = v(4);
    s.sigma_cmd = cmd;
    s.sigma_achieved = ach;
    out.push_back(s);
  };

  while (x < cfg.x_end) {
    const double cmd = schedule(x);
    const double ach = servo ? servo->step(cmd) : cmd;
    record(cmd, ach);
    const aero::Matrix5d m = plant.A + ach * plant.B_sigma;
    rk4_step(m, cfg.u0, cfg.dt, v, x);
    t += cfg.dt;
    if (!v.allFinite() || v.cwiseAbs().maxCoeff() > cfg.divergence_bound)
      throw DivergenceError("simulation diverged: state left the configured bound", t, x);
    if (t > t_limit)
      throw DivergenceError("simulation stalled: along-track progress too slow", t, x);
  }
  {
    const double cmd = schedule(x);
    record(cmd, servo ? servo->output() : cmd);
  }
  return out;
}

inline Trajectory integrate(const aero::PlantMatrices& plant, const ctrl::MorphSchedule& schedule,
                            act::Actuator* servo, const SimConfig& cfg) {
  return integrate(
      plant, [&schedule](double x) { return schedule.sigma_at(x); }, servo, cfg);
}

struct VelocityDeviation {
  std::vector<double> u;
  double max_abs = 0.0;
  double rms = 0.0;
};

inline VelocityDeviation velocity_deviation(const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("velocity_deviation: empty trajectory");
  VelocityDeviation d;
  d.u.reserve(traj.size());
  double ss = 0.0;
  for (const auto& s : traj) {
    d.u.push_back(s.u);
    d.max_abs = std::max(d.max_abs, std::abs(s.u));
    ss += s.u * s.u;
  }
  d.rms = std::sqrt(ss / static_cast<double>(traj.size()));
  return d;
}

struct TrackingMetrics {
  double threshold = 1.0;          // clearance band [m]
  std::vector<double> clearance;   // per trajectory sample [m]
  double length_total = 0.0;       // evaluated x-length [m]
  double length_under = 0.0;       // x-length with |clearance| < threshold
  double fraction_under = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  double max_clearance = -std::numeric_limits<double>::infinity();
  std::vector<double> span_min_clearance;  // trough per span
  long saturated_count = 0;                // schedule samples flagged saturated
};

// clearance(x) = (h_ref + h) - wire height. Interval lengths are attributed by
// the left sample, so length_under + length_at_or_over = length_total exactly.
inline TrackingMetrics clearance_metrics(const Trajectory& traj,
                                         const env::PowerlineProfile& profile, double h_ref,
                                         double threshold = 1.0) {
  if (traj.size() < 2) throw std::invalid_argument("clearance_metrics: trajectory too short");
  const double total = profile.total_length();
  if (traj.front().x > 1e-6 || traj.back().x < total - 1e-6)
    throw std::invalid_argument("clearance_metrics: trajectory does not cover the profile");

  TrackingMetrics m;
  m.threshold = threshold;
  m.clearance.reserve(traj.size());
  m.span_min_clearance.assign(profile.span_count(),
                              std::numeric_limits<double>::infinity());
  auto clamp_x = [total](double x) { return std::min(std::max(x, 0.0), total); };
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double xc = clamp_x(traj[i].x);
    const double c = (h_ref + traj[i].h) - profile.wire_height_at(xc);
    m.clearance.push_back(c);
    m.min_clearance = std::min(m.min_clearance, c);
    m.max_clearance = std::max(m.max_clearance, c);
    auto& trough = m.span_min_clearance[profile.span_index_at(xc)];
    trough = std::min(trough, c);
    if (i + 1 < traj.size()) {
      const double dx = clamp_x(traj[i + 1].x) - xc;
      m.length_total += dx;
      if (std::abs(c) < threshold) m.length_under += dx;
    }
  }
  m.fraction_under = m.length_total > 0.0 ? m.length_under / m.length_total : 0.0;
  return m;
}

// Slow-mode wavelength: trim speed over the Phugoid temporal frequency.
inline double phugoid_wavelength(const aero::StabilityDerivatives& d, double sigma = 0.0) {
  return d.u0 / ctrl::phugoid_frequency(d, sigma);
}

// Geometry-resolved variant: the morph state enters through a fresh derivative
// set about sigma, so the model's nonlinear sensitivity growth is retained.
inline double phugoid_wavelength(const aero::SyntheticAeroModel& model,
                                 const aero::AircraftGeometry& geom,
                                 const aero::FlightCondition& cond, double sigma) {
  const aero::StabilityDerivatives d = aero::derive_stability_matrices(model, geom, cond, sigma);
  return d.u0 / ctrl::phugoid_frequency(d, 0.0);
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const env::PowerlineProfile& profile, double h_ref) {
  out << "t,x,u,w,q,theta,h,sigma_cmd,sigma_achieved,wire_height,clearance\n";
  const double total = profile.total_length();
  for (const auto& s : traj) {
    const double xc = std::min(std::max(s.x, 0.0), total);
    const double wh = profile.wire_height_at(xc);
    const double c = (h_ref + s.h) - wh;
    out << io::format_double(s.t) << ',' << io::format_double(s.x) << ','
        << io::format_double(s.u) << ',' << io::format_double(s.w) << ','
        << io::format_double(s.q) << ',' << io::format_double(s.theta) << ','
        << io::format_double(s.h) << ',' << io::format_double(s.sigma_cmd) << ','
        << io::format_double(s.sigma_achieved) << ',' << io::format_double(wh) << ','
        << io::format_double(c) << '\n';
  }
}

}  // namespace plus::sim
