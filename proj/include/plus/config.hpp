#pragma once
// Run configuration: one JSON document with sections per module, every field
// optional with shipped defaults. Type or range violations raise ConfigError
// naming the offending field, which the CLI maps to exit code 2.
//
// Also: the reference-plant file format ({"A": 5x5, "B_sigma": 5x5}, row
// major) and the run manifest written next to every command's outputs.

#include <json.hpp>

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plus/actuator.hpp"
#include "plus/aero.hpp"
#include "plus/stability.hpp"
#include "plus/sweep.hpp"
#include "plus/synthetic.hpp"

namespace plus::cfg {

inline constexpr const char* kLibraryVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const std::string& section, const char* key,
            const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config field " + section + "." + key + " has the wrong type");
  }
}

inline void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw ConfigError("config field " + field + " must be positive");
}

}  // namespace detail

struct SimulateSection {
  double dt = 1e-3;
  double u0 = 25.0;
  int spans = 4;
  double span_length_m = 70.0;
  double tower_height_m = 30.0;
  double sag_fraction = 0.02;
  double schedule_dx_m = 0.5;
  std::array<double, 5> initial_state{-0.75, 0.0, 0.0, 0.0, 0.0};
  double divergence_bound = 1e4;
  std::string actuator_mode = "ideal";   // "ideal" | "servo"
  std::string h_row = "climb_rate";      // "climb_rate" | "range_rate"
  std::string plant_source = "file";     // "file" | "synthetic"
  std::string plant_file = "reference_plant.json";
  double sigma_lo = -0.032;
  double sigma_hi = 0.055;
  double gating_floor = 0.0;

  void validate() const {
    detail::require_positive(dt, "simulate.dt");
    detail::require_positive(u0, "simulate.u0");
    if (spans < 1) throw ConfigError("config field simulate.spans must be >= 1");
    detail::require_positive(span_length_m, "simulate.span_length_m");
    detail::require_positive(tower_height_m, "simulate.tower_height_m");
    detail::require_positive(sag_fraction, "simulate.sag_fraction");
    detail::require_positive(schedule_dx_m, "simulate.schedule_dx_m");
    detail::require_positive(divergence_bound, "simulate.divergence_bound");
    if (actuator_mode != "ideal" && actuator_mode != "servo")
      throw ConfigError("config field simulate.actuator_mode must be 'ideal' or 'servo'");
    if (h_row != "climb_rate" && h_row != "range_rate")
      throw ConfigError("config field simulate.h_row must be 'climb_rate' or 'range_rate'");
    if (plant_source != "file" && plant_source != "synthetic")
      throw ConfigError("config field simulate.plant_source must be 'file' or 'synthetic'");
    if (!(sigma_hi > sigma_lo))
      throw ConfigError("config field simulate.sigma_hi must exceed simulate.sigma_lo");
    if (gating_floor < 0.0)
      throw ConfigError("config field simulate.gating_floor must be non-negative");
  }
};

struct AircraftSection {
  double span_m = 1.4;
  double chord_m = 0.254;
  double mass_kg = 3.38106240447;
  double inertia_yy = 0.141852487179;

  aero::AircraftGeometry geometry() const { return {span_m, chord_m, mass_kg, inertia_yy}; }

  void validate() const {
    detail::require_positive(span_m, "aircraft.span_m");
    detail::require_positive(chord_m, "aircraft.chord_m");
    detail::require_positive(mass_kg, "aircraft.mass_kg");
    detail::require_positive(inertia_yy, "aircraft.inertia_yy");
  }
};

struct ModelSection {
  std::string airfoil = "2412";
  std::string morph_mode = "thickness";  // "thickness" | "camber"
  double alpha_zero_lift = -0.0528499763953;
  double CLV = 0.465824570755;
  double CD0 = 0.02;
  double CDa = 0.31940837003;
  double CDa2 = 0.0;
  double CDV = 0.0059491045533;
  double Cm0 = 0.0;
  double Cma = -0.6;
  double CmV = 0.275794871795;
  double Cmq = -26.6060973148;
  double CL0_mu = 1.22944901372;
  double CLa_mu = 9.41956643343;
  double CD0_mu = 0.103075018322;
  double CDa_mu = 2.5309263535;
  double Cm0_mu = 1.29892307692;
  double Cma_mu = 9.76328205128;
  double Cmq_mu = -129.473046638;
  double sensitivity_growth = 4.0;

  aero::SyntheticModelParams params() const {
    aero::SyntheticModelParams p;
    p.mode = morph_mode == "camber" ? aero::MorphMode::camber : aero::MorphMode::thickness;
    p.family = aero::AirfoilFamily::parse(airfoil);
    p.alpha_zero_lift = alpha_zero_lift;
    p.CLV = CLV;
    p.CD0 = CD0;
    p.CDa = CDa;
    p.CDa2 = CDa2;
    p.CDV = CDV;
    p.Cm0 = Cm0;
    p.Cma = Cma;
    p.CmV = CmV;
    p.Cmq = Cmq;
    p.CL0_mu = CL0_mu;
    p.CLa_mu = CLa_mu;
    p.CD0_mu = CD0_mu;
    p.CDa_mu = CDa_mu;
    p.Cm0_mu = Cm0_mu;
    p.Cma_mu = Cma_mu;
    p.Cmq_mu = Cmq_mu;
    p.sensitivity_growth = sensitivity_growth;
    return p;
  }

  void validate() const {
    if (morph_mode != "thickness" && morph_mode != "camber")
      throw ConfigError("config field model.morph_mode must be 'thickness' or 'camber'");
    try {
      aero::AirfoilFamily::parse(airfoil);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config field model.airfoil: ") + e.what());
    }
  }
};

struct ActuatorSection {
  act::ActuatorParams params;  // defaults are the identified servo

  void validate() const {
    try {
      params.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config section actuator: ") + e.what());
    }
  }
};

struct SweepSection {
  std::vector<double> wingspans_m = {1.0, 1.4, 1.8};
  std::vector<double> chords_m = {0.203, 0.254, 0.305};
  std::vector<double> pylon_spans_m = {40.0, 100.0, 300.0, 500.0};
  std::vector<double> sag_fractions = {0.01, 0.02, 0.03, 0.04, 0.05};
  int trials_per_cell = 25;
  int spans_per_run = 1;
  double dt = 1e-3;
  double schedule_dx_m = 0.5;
  double jitter_u_frac = 0.05;
  double jitter_h_m = 0.5;

  sweep::SweepGrid grid() const {
    sweep::SweepGrid g;
    g.wingspans_m = wingspans_m;
    g.chords_m = chords_m;
    g.pylon_spans_m = pylon_spans_m;
    g.sag_fractions = sag_fractions;
    g.trials_per_cell = trials_per_cell;
    return g;
  }

  void validate() const {
    try {
      grid().validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config section sweep: ") + e.what());
    }
    if (spans_per_run < 1) throw ConfigError("config field sweep.spans_per_run must be >= 1");
    detail::require_positive(dt, "sweep.dt");
    detail::require_positive(schedule_dx_m, "sweep.schedule_dx_m");
  }
};

struct SysidSection {
  double amplitude_deg = 3.0;
  int steps = 8;
  double dwell_s = 1.5;
  double noise_std = 0.0;
  double rate_hz = 120.0;

  void validate() const {
    detail::require_positive(amplitude_deg, "sysid.amplitude_deg");
    if (steps < 1) throw ConfigError("config field sysid.steps must be >= 1");
    detail::require_positive(dwell_s, "sysid.dwell_s");
    if (noise_std < 0.0) throw ConfigError("config field sysid.noise_std must be >= 0");
    detail::require_positive(rate_hz, "sysid.rate_hz");
  }
};

struct RunConfig {
  std::uint64_t master_seed = 1;
  SimulateSection simulate;
  AircraftSection aircraft;
  ModelSection model;
  ActuatorSection actuator;
  SweepSection sweep;
  SysidSection sysid;
  std::string base_dir = ".";  // directory of the config file, for relative paths

  void validate() const {
    simulate.validate();
    aircraft.validate();
    model.validate();
    actuator.validate();
    sweep.validate();
    sysid.validate();
  }
};

inline RunConfig parse_run_config(const nlohmann::json& j, const std::string& base_dir) {
  using detail::get_field;
  RunConfig c;
  c.base_dir = base_dir;
  c.master_seed = get_field<std::uint64_t>(j, "", "master_seed", c.master_seed);

  const nlohmann::json empty = nlohmann::json::object();
  const nlohmann::json& js = j.contains("simulate") ? j.at("simulate") : empty;
  auto& s = c.simulate;
  s.dt = get_field(js, "simulate", "dt", s.dt);
  s.u0 = get_field(js, "simulate", "u0", s.u0);
  s.spans = get_field(js, "simulate", "spans", s.spans);
  s.span_length_m = get_field(js, "simulate", "span_length_m", s.span_length_m);
  s.tower_height_m = get_field(js, "simulate", "tower_height_m", s.tower_height_m);
  s.sag_fraction = get_field(js, "simulate", "sag_fraction", s.sag_fraction);
  s.schedule_dx_m = get_field(js, "simulate", "schedule_dx_m", s.schedule_dx_m);
  s.initial_state = get_field(js, "simulate", "initial_state", s.initial_state);
  s.divergence_bound = get_field(js, "simulate", "divergence_bound", s.divergence_bound);
  s.actuator_mode = get_field(js, "simulate", "actuator_mode", s.actuator_mode);
  s.h_row = get_field(js, "simulate", "h_row", s.h_row);
  s.plant_source = get_field(js, "simulate", "plant_source", s.plant_source);
  s.plant_file = get_field(js, "simulate", "plant_file", s.plant_file);
  s.sigma_lo = get_field(js, "simulate", "sigma_lo", s.sigma_lo);
  s.sigma_hi = get_field(js, "simulate", "sigma_hi", s.sigma_hi);
  s.gating_floor = get_field(js, "simulate", "gating_floor", s.gating_floor);

  const nlohmann::json& ja = j.contains("aircraft") ? j.at("aircraft") : empty;
  auto& a = c.aircraft;
  a.span_m = get_field(ja, "aircraft", "span_m", a.span_m);
  a.chord_m = get_field(ja, "aircraft", "chord_m", a.chord_m);
  a.mass_kg = get_field(ja, "aircraft", "mass_kg", a.mass_kg);
  a.inertia_yy = get_field(ja, "aircraft", "inertia_yy", a.inertia_yy);

  const nlohmann::json& jm = j.contains("model") ? j.at("model") : empty;
  auto& m = c.model;
  m.airfoil = get_field(jm, "model", "airfoil", m.airfoil);
  m.morph_mode = get_field(jm, "model", "morph_mode", m.morph_mode);
  m.alpha_zero_lift = get_field(jm, "model", "alpha_zero_lift", m.alpha_zero_lift);
  m.CLV = get_field(jm, "model", "CLV", m.CLV);
  m.CD0 = get_field(jm, "model", "CD0", m.CD0);
  m.CDa = get_field(jm, "model", "CDa", m.CDa);
  m.CDa2 = get_field(jm, "model", "CDa2", m.CDa2);
  m.CDV = get_field(jm, "model", "CDV", m.CDV);
  m.Cm0 = get_field(jm, "model", "Cm0", m.Cm0);
  m.Cma = get_field(jm, "model", "Cma", m.Cma);
  m.CmV = get_field(jm, "model", "CmV", m.CmV);
  m.Cmq = get_field(jm, "model", "Cmq", m.Cmq);
  m.CL0_mu = get_field(jm, "model", "CL0_mu", m.CL0_mu);
  m.CLa_mu = get_field(jm, "model", "CLa_mu", m.CLa_mu);
  m.CD0_mu = get_field(jm, "model", "CD0_mu", m.CD0_mu);
  m.CDa_mu = get_field(jm, "model", "CDa_mu", m.CDa_mu);
  m.Cm0_mu = get_field(jm, "model", "Cm0_mu", m.Cm0_mu);
  m.Cma_mu = get_field(jm, "model", "Cma_mu", m.Cma_mu);
  m.Cmq_mu = get_field(jm, "model", "Cmq_mu", m.Cmq_mu);
  m.sensitivity_growth = get_field(jm, "model", "sensitivity_growth", m.sensitivity_growth);

  const nlohmann::json& jt = j.contains("actuator") ? j.at("actuator") : empty;
  auto& t = c.actuator.params;
  t.bench_gain = get_field(jt, "actuator", "bench_gain", t.bench_gain);
  t.damping = get_field(jt, "actuator", "damping", t.damping);
  t.natural_freq_hz = get_field(jt, "actuator", "natural_freq_hz", t.natural_freq_hz);
  t.delay_s = get_field(jt, "actuator", "delay_s", t.delay_s);
  t.slew_deg_per_s = get_field(jt, "actuator", "slew_deg_per_s", t.slew_deg_per_s);
  t.full_throw_deg = get_field(jt, "actuator", "full_throw_deg", t.full_throw_deg);
  t.sigma_range = get_field(jt, "actuator", "sigma_range", t.sigma_range);

  const nlohmann::json& jw = j.contains("sweep") ? j.at("sweep") : empty;
  auto& w = c.sweep;
  w.wingspans_m = get_field(jw, "sweep", "wingspans_m", w.wingspans_m);
  w.chords_m = get_field(jw, "sweep", "chords_m", w.chords_m);
  w.pylon_spans_m = get_field(jw, "sweep", "pylon_spans_m", w.pylon_spans_m);
  w.sag_fractions = get_field(jw, "sweep", "sag_fractions", w.sag_fractions);
  w.trials_per_cell = get_field(jw, "sweep", "trials_per_cell", w.trials_per_cell);
  w.spans_per_run = get_field(jw, "sweep", "spans_per_run", w.spans_per_run);
  w.dt = get_field(jw, "sweep", "dt", w.dt);
  w.schedule_dx_m = get_field(jw, "sweep", "schedule_dx_m", w.schedule_dx_m);
  w.jitter_u_frac = get_field(jw, "sweep", "jitter_u_frac", w.jitter_u_frac);
  w.jitter_h_m = get_field(jw, "sweep", "jitter_h_m", w.jitter_h_m);

  const nlohmann::json& ji = j.contains("sysid") ? j.at("sysid") : empty;
  auto& i = c.sysid;
  i.amplitude_deg = get_field(ji, "sysid", "amplitude_deg", i.amplitude_deg);
  i.steps = get_field(ji, "sysid", "steps", i.steps);
  i.dwell_s = get_field(ji, "sysid", "dwell_s", i.dwell_s);
  i.noise_std = get_field(ji, "sysid", "noise_std", i.noise_std);
  i.rate_hz = get_field(ji, "sysid", "rate_hz", i.rate_hz);

  c.validate();
  return c;
}

inline std::string parent_dir(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + path + ": top level must be an object");
  return parse_run_config(j, parent_dir(path));
}

// Effective configuration back out as JSON, for the manifest snapshot.
inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["master_seed"] = c.master_seed;
  j["simulate"] = {{"dt", c.simulate.dt},
                   {"u0", c.simulate.u0},
                   {"spans", c.simulate.spans},
                   {"span_length_m", c.simulate.span_length_m},
                   {"tower_height_m", c.simulate.tower_height_m},
                   {"sag_fraction", c.simulate.sag_fraction},
                   {"schedule_dx_m", c.simulate.schedule_dx_m},
                   {"initial_state", c.simulate.initial_state},
                   {"divergence_bound", c.simulate.divergence_bound},
                   {"actuator_mode", c.simulate.actuator_mode},
                   {"h_row", c.simulate.h_row},
                   {"plant_source", c.simulate.plant_source},
                   {"plant_file", c.simulate.plant_file},
                   {"sigma_lo", c.simulate.sigma_lo},
                   {"sigma_hi", c.simulate.sigma_hi},
                   {"gating_floor", c.simulate.gating_floor}};
  j["aircraft"] = {{"span_m", c.aircraft.span_m},
                   {"chord_m", c.aircraft.chord_m},
                   {"mass_kg", c.aircraft.mass_kg},
                   {"inertia_yy", c.aircraft.inertia_yy}};
  j["model"] = {{"airfoil", c.model.airfoil},
                {"morph_mode", c.model.morph_mode},
                {"alpha_zero_lift", c.model.alpha_zero_lift},
                {"CLV", c.model.CLV},
                {"CD0", c.model.CD0},
                {"CDa", c.model.CDa},
                {"CDa2", c.model.CDa2},
                {"CDV", c.model.CDV},
                {"Cm0", c.model.Cm0},
                {"Cma", c.model.Cma},
                {"CmV", c.model.CmV},
                {"Cmq", c.model.Cmq},
                {"CL0_mu", c.model.CL0_mu},
                {"CLa_mu", c.model.CLa_mu},
                {"CD0_mu", c.model.CD0_mu},
                {"CDa_mu", c.model.CDa_mu},
                {"Cm0_mu", c.model.Cm0_mu},
                {"Cma_mu", c.model.Cma_mu},
                {"Cmq_mu", c.model.Cmq_mu},
                {"sensitivity_growth", c.model.sensitivity_growth}};
  j["actuator"] = {{"bench_gain", c.actuator.params.bench_gain},
                   {"damping", c.actuator.params.damping},
                   {"natural_freq_hz", c.actuator.params.natural_freq_hz},
                   {"delay_s", c.actuator.params.delay_s},
                   {"slew_deg_per_s", c.actuator.params.slew_deg_per_s},
                   {"full_throw_deg", c.actuator.params.full_throw_deg},
                   {"sigma_range", c.actuator.params.sigma_range}};
  j["sweep"] = {{"wingspans_m", c.sweep.wingspans_m},
                {"chords_m", c.sweep.chords_m},
                {"pylon_spans_m", c.sweep.pylon_spans_m},
                {"sag_fractions", c.sweep.sag_fractions},
                {"trials_per_cell", c.sweep.trials_per_cell},
                {"spans_per_run", c.sweep.spans_per_run},
                {"dt", c.sweep.dt},
                {"schedule_dx_m", c.sweep.schedule_dx_m},
                {"jitter_u_frac", c.sweep.jitter_u_frac},
                {"jitter_h_m", c.sweep.jitter_h_m}};
  j["sysid"] = {{"amplitude_deg", c.sysid.amplitude_deg},
                {"steps", c.sysid.steps},
                {"dwell_s", c.sysid.dwell_s},
                {"noise_std", c.sysid.noise_std},
                {"rate_hz", c.sysid.rate_hz}};
  return j;
}

// ---------------------------------------------------------------------------
// Reference plant file

inline aero::PlantMatrices load_plant_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plant file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("plant file " + path + ": " + e.what());
  }
  auto read_matrix = [&](const char* key) {
    if (!j.contains(key))
      throw ConfigError("plant file " + path + ": missing matrix '" + key + "'");
    const auto& rows = j.at(key);
    if (!rows.is_array() || rows.size() != 5)
      throw ConfigError("plant file " + path + ": '" + key + "' must be 5 rows");
    aero::Matrix5d m;
    for (int r = 0; r < 5; ++r) {
      const auto& row = rows.at(r);
      if (!row.is_array() || row.size() != 5)
        throw ConfigError("plant file " + path + ": '" + key + "' row " + std::to_string(r) +
                          " must have 5 entries");
      for (int c = 0; c < 5; ++c) {
        try {
          m(r, c) = row.at(c).get<double>();
        } catch (const nlohmann::json::exception&) {
          throw ConfigError("plant file " + path + ": '" + key + "' entry (" +
                            std::to_string(r) + "," + std::to_string(c) + ") is not a number");
        }
      }
    }
    return m;
  };
  aero::PlantMatrices p;
  p.A = read_matrix("A");
  p.B_sigma = read_matrix("B_sigma");
  return p;
}

// Plant for the single-run simulation per the config: either the reference
// file verbatim (altitude row rewritten to the configured convention) or a
// fresh derivation from the synthetic model.
inline aero::PlantMatrices resolve_plant(const RunConfig& c) {
  const aero::HRowConvention conv = c.simulate.h_row == "range_rate"
                                        ? aero::HRowConvention::range_rate
                                        : aero::HRowConvention::climb_rate;
  if (c.simulate.plant_source == "synthetic") {
    const aero::SyntheticAeroModel model(c.model.params(), c.aircraft.geometry());
    const aero::StabilityDerivatives d = aero::derive_stability_matrices(
        model, c.aircraft.geometry(), aero::FlightCondition{c.simulate.u0});
    return aero::assemble_plant(d, conv);
  }
  std::string path = c.simulate.plant_file;
  if (!path.empty() && path.front() != '/') path = c.base_dir + "/" + path;
  aero::PlantMatrices p = load_plant_file(path);
  p.A = aero::h_row_applied(p.A, conv, c.simulate.u0);
  return p;
}

// ---------------------------------------------------------------------------
// Run manifest

struct RunManifest {
  std::string command;
  std::string config_path;
  nlohmann::json resolved_config;
  std::uint64_t master_seed = 0;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  bool success = false;
  std::string error;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_path"] = config_path;
    j["resolved_config"] = resolved_config;
    j["master_seed"] = master_seed;
    j["library_version"] = kLibraryVersion;
    j["outputs"] = outputs;
    j["wall_seconds"] = wall_seconds;
    j["success"] = success;
    if (!error.empty()) j["error"] = error;
    return j;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace plus::cfg
