#pragma once
// Transmission-line reference data and multi-span wire profiles.
//
// The class table is the standard distribution/transmission taxonomy:
// voltage class, typical tower height band, and typical span length band.
// Open-ended upper limits are represented as +infinity.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "plus/catenary.hpp"

namespace plus::env {

inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;  // vacuum permeability [T m/A]

struct LineClass {
  const char* name;
  double voltage_kv_min;   // exclusive lower bound, 0 for the lowest class
  double voltage_kv_max;   // inclusive upper bound
  double tower_height_min; // [m]
  double tower_height_max; // [m]
  double span_min;         // [m]
  double span_max;         // [m]
};

inline constexpr double kOpenEnded = std::numeric_limits<double>::infinity();

inline constexpr std::array<LineClass, 5> kLineClasses{{
    {"LV", 0.0, 1.0, 10.0, 15.0, 30.0, 50.0},
    {"MV", 1.0, 69.0, 15.0, 30.0, 50.0, 150.0},
    {"HV", 69.0, 230.0, 30.0, 50.0, 150.0, 400.0},
    {"EHV", 230.0, 500.0, 50.0, 80.0, 300.0, 500.0},
    {"UHV", 800.0, kOpenEnded, 80.0, kOpenEnded, 500.0, kOpenEnded},
}};

// Class for a nominal line voltage. Upper bounds are inclusive; the 500-800 kV
// band is not tabulated and is rejected rather than guessed.
inline const LineClass& class_for_voltage(double voltage_kv) {
  if (!(voltage_kv >= 0.0))
    throw std::invalid_argument("class_for_voltage: voltage must be non-negative");
  if (voltage_kv >= 800.0) return kLineClasses[4];
  for (const auto& c : kLineClasses)
    if (voltage_kv <= c.voltage_kv_max) return c;
  throw std::domain_error("class_for_voltage: " + std::to_string(voltage_kv) +
                          " kV falls in the untabulated 500-800 kV band");
}

// First class whose typical span band contains the given span length.
inline const LineClass& class_for_span(double span_m) {
  for (const auto& c : kLineClasses)
    if (span_m >= c.span_min && span_m <= c.span_max) return c;
  throw std::domain_error("class_for_span: no class spans " + std::to_string(span_m) + " m");
}

// Magnetic flux density of a long straight conductor: B = mu0 I / (2 pi R).
inline double wire_magnetic_field(double current_a, double distance_m) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("wire_magnetic_field: distance must be positive");
  if (!std::isfinite(current_a))
    throw std::invalid_argument("wire_magnetic_field: non-finite current");
  return kMu0 * current_a / (2.0 * std::numbers::pi * distance_m);
}

// A sequence of catenary spans sharing towers. Span i occupies
// [tower_x[i], tower_x[i+1]] in the global along-track coordinate.
class PowerlineProfile {
 public:
  explicit PowerlineProfile(std::vector<CatenarySpec> spans) : spans_(std::move(spans)) {
    if (spans_.empty()) throw std::invalid_argument("PowerlineProfile: no spans");
    tower_x_.reserve(spans_.size() + 1);
    tower_x_.push_back(0.0);
    for (std::size_t i = 0; i < spans_.size(); ++i) {
      spans_[i].validate();
      if (i > 0 && std::abs(spans_[i].tower_height - spans_[i - 1].tower_height) > 1e-9)
        throw std::invalid_argument(
            "PowerlineProfile: tower height discontinuity between spans " +
            std::to_string(i - 1) + " and " + std::to_string(i));
      tower_x_.push_back(tower_x_.back() + spans_[i].span_length);
    }
  }

  const std::vector<CatenarySpec>& spans() const { return spans_; }
  const std::vector<double>& tower_positions() const { return tower_x_; }
  double total_length() const { return tower_x_.back(); }
  std::size_t span_count() const { return spans_.size(); }

  std::size_t span_index_at(double x) const {
    if (!std::isfinite(x) || x < 0.0 || x > total_length())
      throw std::domain_error("PowerlineProfile: x = " + std::to_string(x) +
                              " outside [0, " + std::to_string(total_length()) + "]");
    if (x >= tower_x_[spans_.size() - 1]) {
      // final span covers its closing tower
      if (x >= tower_x_.back()) return spans_.size() - 1;
    }
    const auto it = std::upper_bound(tower_x_.begin(), tower_x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - tower_x_.begin());
    return std::min(i == 0 ? 0 : i - 1, spans_.size() - 1);
  }

  double span_local(double x, std::size_t span_index) const {
    return x - tower_x_[span_index];
  }

  double wire_height_at(double x) const {
    const std::size_t i = span_index_at(x);
    return height_above_ground(spans_[i], x - tower_x_[i]);
  }

 private:
  std::vector<CatenarySpec> spans_;
  std::vector<double> tower_x_;
};

// n identical spans, with the catenary parameter solved once from the sag.
inline PowerlineProfile uniform_profile(std::size_t n_spans, double span_length,
                                        double tower_height, double sag_fraction) {
  if (n_spans == 0) throw std::invalid_argument("uniform_profile: n_spans must be >= 1");
  const CatenarySpec s = solve_catenary_from_sag(span_length, sag_fraction, tower_height);
  return PowerlineProfile(std::vector<CatenarySpec>(n_spans, s));
}

}  // namespace plus::env
