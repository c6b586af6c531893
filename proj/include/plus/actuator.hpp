#pragma once
// Morphing actuator: second-order servo with transport delay and slew limiting.
//
// Continuous model K * wn^2 / (s^2 + 2 zeta wn s + wn^2) * exp(-Td s),
// discretized exactly (zero-order hold) at the caller's step. The transport
// delay is an integer command queue of length ceil(Td/dt); the slew limit acts
// on the achieved output, clamping each step to prev +/- limit*dt, so the
// output rate can never exceed the limit.
//
// Two unit conventions share the core:
//   - bench: command in servo degrees, output = gain * response (identified rig)
//   - sigma loop: command and output in morph units, unit DC gain, slew mapped
//     through the throw/range conversion.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace plus::act {

struct ActuatorParams {
  double bench_gain = 0.01333;        // identified output per servo degree
  double damping = 0.45;              // zeta
  double natural_freq_hz = 1.0;       // wn / 2 pi
  double delay_s = 0.05;              // transport delay Td
  double slew_deg_per_s = 60.0 / 0.11;
  double full_throw_deg = 60.0;       // servo travel covering the morph range
  double sigma_range = 0.087;         // morph units covered by the full throw

  double natural_freq_rad() const { return 2.0 * std::numbers::pi * natural_freq_hz; }
  double slew_sigma_per_s() const { return slew_deg_per_s * sigma_range / full_throw_deg; }

  void validate() const {
    if (!(damping > 0.0)) throw std::invalid_argument("ActuatorParams: damping must be positive");
    if (!(natural_freq_hz > 0.0))
      throw std::invalid_argument("ActuatorParams: natural_freq_hz must be positive");
    if (delay_s < 0.0) throw std::invalid_argument("ActuatorParams: delay_s must be >= 0");
    if (!(slew_deg_per_s > 0.0))
      throw std::invalid_argument("ActuatorParams: slew_deg_per_s must be positive");
    if (!(full_throw_deg > 0.0) || !(sigma_range > 0.0))
      throw std::invalid_argument("ActuatorParams: throw and sigma_range must be positive");
  }
};

// Frequency response of the transfer function as printed in the source
// identification report: 0.01333 (1 - e^{-0.005 s}) / (s^2 - 1.838 s + 1).
// Kept verbatim for comparison plots only; the negative damping term and the
// vanishing DC gain are inconsistent with the identified stable servo, which
// the Actuator class models instead.
inline std::complex<double> printed_servo_response(std::complex<double> s) {
  return 0.01333 / (s * s - 1.838 * s + 1.0) * (1.0 - std::exp(-0.005 * s));
}

// Slew clamp: the returned value is exactly prev + limit*dt (or prev - limit*dt)
// when the limit binds, else the proposal unchanged.
inline double apply_slew(double prev, double proposed, double dt, double limit_per_s) {
  if (!(dt > 0.0)) throw std::invalid_argument("apply_slew: dt must be positive");
  if (!(limit_per_s > 0.0)) throw std::invalid_argument("apply_slew: limit must be positive");
  const double up = prev + limit_per_s * dt;
  const double dn = prev - limit_per_s * dt;
  if (proposed > up) return up;
  if (proposed < dn) return dn;
  return proposed;
}

// Exact zero-order-hold discretization of xdot = A x + B u for the unit-gain
// second-order servo, valid for any positive damping.
struct Zoh2 {
  Eigen::Matrix2d Ad;
  Eigen::Vector2d Bd;
};

inline Zoh2 zoh_second_order(double damping, double wn, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("zoh_second_order: dt must be positive");
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 1) = 1.0;
  m(1, 0) = -wn * wn;
  m(1, 1) = -2.0 * damping * wn;
  m(1, 2) = wn * wn;
  const Eigen::Matrix3d e = (m * dt).exp();
  Zoh2 z;
  z.Ad = e.topLeftCorner<2, 2>();
  z.Bd = e.topRightCorner<2, 1>();
  return z;
}

class Actuator {
 public:
  enum class Units { sigma_loop, bench };

  Actuator(const ActuatorParams& params, double dt, Units units = Units::sigma_loop)
      : p_(params), dt_(dt), units_(units) {
    p_.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("Actuator: dt must be positive");
    if (p_.delay_s > 0.0 && dt > p_.delay_s)
      throw std::invalid_argument("Actuator: dt must not exceed the transport delay");
    zoh_ = zoh_second_order(p_.damping, p_.natural_freq_rad(), dt);
    delay_steps_ = p_.delay_s > 0.0
                       ? static_cast<std::size_t>(std::ceil(p_.delay_s / dt - 1e-12))
                       : 0;
    gain_ = units == Units::bench ? p_.bench_gain : 1.0;
    slew_ = units == Units::bench ? p_.bench_gain * p_.slew_deg_per_s : p_.slew_sigma_per_s();
    reset();
  }

  std::size_t delay_steps() const { return delay_steps_; }
  double output_slew_per_s() const { return slew_; }
  double dt() const { return dt_; }

  void reset(double output0 = 0.0) {
    x_.setZero();
    x_(0) = output0 / gain_;
    y_ = output0;
    queue_.assign(delay_steps_, output0 / gain_);
  }

  // Advances one step with the given command held over it; returns the achieved
  // output at the end of the step.
  double step(double command) {
    double u = command;
    if (delay_steps_ > 0) {
      queue_.push_back(command);
      u = queue_.front();
      queue_.pop_front();
    }
    x_ = (zoh_.Ad * x_ + zoh_.Bd * u).eval();
    y_ = apply_slew(y_, gain_ * x_(0), dt_, slew_);
    return y_;
  }

  double output() const { return y_; }

 private:
  ActuatorParams p_;
  double dt_ = 0.0;
  Units units_;
  Zoh2 zoh_;
  std::size_t delay_steps_ = 0;
  double gain_ = 1.0;
  double slew_ = 0.0;
  Eigen::Vector2d x_;
  double y_ = 0.0;
  std::deque<double> queue_;
};

struct StepSample {
  double t = 0.0;
  double command = 0.0;
  double output = 0.0;
};

// Step response from rest: command jumps to amplitude at t = 0.
inline std::vector<StepSample> step_response(const ActuatorParams& params, double amplitude,
                                             double dt, double duration,
                                             Actuator::Units units = Actuator::Units::bench) {
  Actuator act(params, dt, units);
  std::vector<StepSample> out;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration / dt));
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double y = act.step(amplitude);
    out.push_back({(k + 1) * dt, amplitude, y});
  }
  return out;
}

}  // namespace plus::act
