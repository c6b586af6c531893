#pragma once
// Feedforward morphing controller: frequency-matches the slow longitudinal
// (Phugoid) mode to the local spatial frequency of the wire contour.
//
// Sign convention: with Zu < 0 and Zq = u0 > 0 the Phugoid frequency is
//   omega_t(sigma) = sqrt( g * (-(Zu + Zu_s(sigma) * sigma)) / Zq )
// which reduces to the classical sqrt(-g Zu / u0) approximation at sigma = 0.
// Thickening (sigma > 0, Zu_s < 0) stiffens the mode. A literal variant that
// rectifies the radicand with |.| is kept for comparison runs.
//
// The matching condition omega_t(sigma) = u0 * omega_s(x) is solved per sample
// as the residual
//   r(sigma) = -(Zu + Zu_s(sigma) * sigma) - Zq * (u0 x / y(x))^2 / g = 0
// by Newton-Raphson with a bracketed bisection fallback; commands saturate at
// the morph envelope and are flagged.

#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "plus/catenary.hpp"
#include "plus/csv.hpp"
#include "plus/powerline.hpp"
#include "plus/rootfind.hpp"
#include "plus/stability.hpp"

namespace plus::ctrl {

using aero::StabilityDerivatives;

inline double phugoid_radicand(const StabilityDerivatives& d, double sigma, double zu_slope) {
  if (!(d.Zq > 0.0)) throw std::domain_error("phugoid_frequency: Zq must be positive");
  return d.gravity * (-(d.Zu + zu_slope * sigma)) / d.Zq;
}

inline double phugoid_frequency(const StabilityDerivatives& d, double sigma) {
  const double r = phugoid_radicand(d, sigma, d.Zu_s);
  if (!(r > 0.0))
    throw std::domain_error("phugoid_frequency: mode not oscillatory at sigma = " +
                            std::to_string(sigma));
  return std::sqrt(r);
}

// Rectified variant: |Zu + Zu_s*sigma| under the radical, never throws on sign.
inline double phugoid_frequency_rectified(const StabilityDerivatives& d, double sigma) {
  if (!(d.Zq > 0.0)) throw std::domain_error("phugoid_frequency: Zq must be positive");
  return std::sqrt(d.gravity * std::abs(d.Zu + d.Zu_s * sigma) / d.Zq);
}

struct MatchingContext {
  StabilityDerivatives derivs;
  double u0 = 0.0;
  env::CatenarySpec catenary;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  // Optional secant morph sensitivity Zu_s(sigma); constant derivs.Zu_s if absent.
  std::function<double(double)> zu_slope_lookup;
  // Commands hold at zero while the required frequency is at or below this floor.
  double gating_floor = 0.0;

  void validate() const {
    catenary.validate();
    if (!(u0 > 0.0)) throw std::invalid_argument("MatchingContext: u0 must be positive");
    if (!(sigma_hi > sigma_lo))
      throw std::invalid_argument("MatchingContext: sigma_hi must exceed sigma_lo");
    if (gating_floor < 0.0)
      throw std::invalid_argument("MatchingContext: gating_floor must be non-negative");
  }

  double zu_slope(double sigma) const {
    return zu_slope_lookup ? zu_slope_lookup(sigma) : derivs.Zu_s;
  }
};

// Required temporal frequency at span-local x: u0 * omega_s(x).
inline double matching_requirement(const MatchingContext& ctx, double x) {
  return ctx.u0 * env::local_spatial_frequency(ctx.catenary, x);
}

struct SigmaCommand {
  double sigma = 0.0;
  bool saturated = false;
};

inline SigmaCommand required_sigma(const MatchingContext& ctx, double x) {
  const double omega_req = matching_requirement(ctx, x);
  const double target = ctx.derivs.Zq * omega_req * omega_req / ctx.derivs.gravity;
  auto residual = [&](double s) { return -(ctx.derivs.Zu + ctx.zu_slope(s) * s) - target; };
  auto slope = [&](double s) {
    if (!ctx.zu_slope_lookup) return -ctx.derivs.Zu_s;
    const double h = 1e-4;
    return (residual(s + h) - residual(s - h)) / (2.0 * h);
  };

  constexpr double kTol = 1e-10;
  num::RootResult r = num::newton(residual, slope, 0.0, kTol, 50);
  if (!r.converged) {
    const double rlo = residual(ctx.sigma_lo);
    const double rhi = residual(ctx.sigma_hi);
    if ((rlo < 0.0) != (rhi < 0.0)) {
      r = num::bisect(residual, ctx.sigma_lo, ctx.sigma_hi, 1e-14, 200);
    } else {
      // root outside the envelope: saturate at the nearer bound
      return {std::abs(rlo) <= std::abs(rhi) ? ctx.sigma_lo : ctx.sigma_hi, true};
    }
  }
  if (r.x < ctx.sigma_lo) return {ctx.sigma_lo, true};
  if (r.x > ctx.sigma_hi) return {ctx.sigma_hi, true};
  return {r.x, false};
}

struct ScheduleEntry {
  double x = 0.0;        // global along-track position [m]
  double span_local = 0.0;
  std::size_t span = 0;
  double sigma = 0.0;
  bool saturated = false;
  bool reset = false;    // first sample after a tower crossing
};

// Per-span feedforward command table. Commands are zero-order held between
// samples; positions before the first sample of a span hold sigma = 0.
class MorphSchedule {
 public:
  MorphSchedule(std::vector<ScheduleEntry> entries, std::vector<double> tower_x, double dx)
      : entries_(std::move(entries)), tower_x_(std::move(tower_x)), dx_(dx) {}

  const std::vector<ScheduleEntry>& entries() const { return entries_; }
  const std::vector<double>& tower_positions() const { return tower_x_; }
  double sample_spacing() const { return dx_; }

  double sigma_at(double x) const { return entry_at(x).sigma; }

  const ScheduleEntry& entry_at(double x) const {
    static const ScheduleEntry kZero{};
    if (entries_.empty()) return kZero;
    // last entry with entry.x <= x, restarting at each tower
    auto it = std::upper_bound(entries_.begin(), entries_.end(), x,
                               [](double v, const ScheduleEntry& e) { return v < e.x; });
    if (it == entries_.begin()) return kZero;
    const ScheduleEntry& e = *(it - 1);
    // a sample belongs to its own span only: positions in a later span that
    // precede that span's first sample hold zero
    const std::size_t span = span_of(x);
    if (e.span != span) return kZero;
    return e;
  }

  long saturated_count(double x0, double x1) const {
    long n = 0;
    for (const auto& e : entries_)
      if (e.x >= x0 && e.x <= x1 && e.saturated) ++n;
    return n;
  }

  void write_csv(std::ostream& out) const {
    out << "x,sigma,saturated_flag,reset_marker\n";
    for (const auto& e : entries_)
      out << io::format_double(e.x) << ',' << io::format_double(e.sigma) << ','
          << (e.saturated ? 1 : 0) << ',' << (e.reset ? 1 : 0) << '\n';
  }

 private:
  std::size_t span_of(double x) const {
    auto it = std::upper_bound(tower_x_.begin(), tower_x_.end(), x);
    if (it == tower_x_.begin()) return 0;
    const std::size_t i = static_cast<std::size_t>(it - tower_x_.begin()) - 1;
    return std::min(i, tower_x_.size() < 2 ? std::size_t{0} : tower_x_.size() - 2);
  }

  std::vector<ScheduleEntry> entries_;
  std::vector<double> tower_x_;
  double dx_ = 0.0;
};

// Builds the command table for a whole profile. The span-local coordinate
// restarts at every tower; samples run x = dx, 2 dx, ... within each span.
inline MorphSchedule build_schedule(const MatchingContext& base, const env::PowerlineProfile& profile,
                                    double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("build_schedule: dx must be positive");
  MatchingContext ctx = base;
  std::vector<ScheduleEntry> entries;
  const auto& towers = profile.tower_positions();
  for (std::size_t si = 0; si < profile.span_count(); ++si) {
    ctx.catenary = profile.spans()[si];
    ctx.validate();
    const double span_len = ctx.catenary.span_length;
    const long n = static_cast<long>(std::floor(span_len / dx + 1e-9));
    bool first = true;
    for (long k = 1; k <= n; ++k) {
      const double xl = std::min(k * dx, span_len);
      ScheduleEntry e;
      e.span = si;
      e.span_local = xl;
      e.x = towers[si] + xl;
      if (matching_requirement(ctx, xl) <= ctx.gating_floor) {
        e.sigma = 0.0;
        e.saturated = false;
      } else {
        const SigmaCommand c = required_sigma(ctx, xl);
        e.sigma = c.sigma;
        e.saturated = c.saturated;
      }
      e.reset = first;
      first = false;
      entries.push_back(e);
    }
  }
  return MorphSchedule(std::move(entries), towers, dx);
}

}  // namespace plus::ctrl
