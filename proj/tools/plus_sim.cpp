// Command-line front end: single-run tracking simulation, batch sweeps,
// actuator identification, environment queries, and the slow-mode wavelength
// map. Every file-writing command drops a manifest next to its outputs, also
// on failure.
//
// Exit codes: 0 success, 2 usage/config error, 3 simulation divergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "plus/actuator.hpp"
#include "plus/config.hpp"
#include "plus/controller.hpp"
#include "plus/csv.hpp"
#include "plus/powerline.hpp"
#include "plus/simulator.hpp"
#include "plus/sweep.hpp"
#include "plus/sysid.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

int effective_jobs(const GlobalArgs& g) {
  if (g.jobs) return *g.jobs;
  if (const char* env = std::getenv("PLUS_SIM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid PLUS_SIM_THREADS='" << env << "'\n";
  }
  return 1;
}

plus::cfg::RunConfig load_config(const GlobalArgs& g) {
  plus::cfg::RunConfig cfg;
  if (!g.config_path.empty()) cfg = plus::cfg::load_run_config(g.config_path);
  if (g.seed) cfg.master_seed = *g.seed;
  return cfg;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Runs a command body under the manifest contract: outputs registered by the
// body are recorded, and the manifest lands in out_dir whether the body
// succeeds or throws.
template <class Body>
int run_with_manifest(const char* command, const GlobalArgs& g, Body&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  plus::cfg::RunManifest manifest;
  manifest.command = command;
  manifest.config_path = g.config_path;
  int code = 0;
  try {
    fs::create_directories(g.out_dir);
    plus::cfg::RunConfig cfg = load_config(g);
    manifest.resolved_config = plus::cfg::to_json(cfg);
    manifest.master_seed = cfg.master_seed;
    body(cfg, manifest);
    manifest.success = true;
  } catch (const plus::cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    manifest.error = e.what();
    code = 2;
  } catch (const plus::sim::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    manifest.error = e.what();
    code = 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    manifest.error = e.what();
    code = 1;
  }
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string manifest_path = join(g.out_dir, std::string(command) + "_manifest.json");
  try {
    manifest.write(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (code == 0) code = 1;
  }
  return code;
}

int cmd_simulate(const GlobalArgs& g) {
  return run_with_manifest("simulate", g, [&](plus::cfg::RunConfig& cfg,
                                              plus::cfg::RunManifest& manifest) {
    const auto& sc = cfg.simulate;
    const plus::aero::PlantMatrices plant = plus::cfg::resolve_plant(cfg);
    const plus::env::PowerlineProfile profile = plus::env::uniform_profile(
        static_cast<std::size_t>(sc.spans), sc.span_length_m, sc.tower_height_m,
        sc.sag_fraction);

    plus::ctrl::MatchingContext ctx;
    ctx.derivs = plus::aero::extract_derivatives(plant);
    ctx.u0 = sc.u0;
    ctx.catenary = profile.spans()[0];
    ctx.sigma_lo = sc.sigma_lo;
    ctx.sigma_hi = sc.sigma_hi;
    ctx.gating_floor = sc.gating_floor;
    const plus::ctrl::MorphSchedule schedule =
        plus::ctrl::build_schedule(ctx, profile, sc.schedule_dx_m);

    plus::sim::SimConfig sim_cfg;
    sim_cfg.dt = sc.dt;
    sim_cfg.u0 = sc.u0;
    sim_cfg.x_end = profile.total_length();
    for (int i = 0; i < 5; ++i) sim_cfg.initial_state(i) = sc.initial_state[static_cast<std::size_t>(i)];
    sim_cfg.divergence_bound = sc.divergence_bound;

    std::optional<plus::act::Actuator> servo;
    if (sc.actuator_mode == "servo")
      servo.emplace(cfg.actuator.params, sc.dt, plus::act::Actuator::Units::sigma_loop);

    const std::string schedule_path = join(g.out_dir, "schedule.csv");
    {
      auto out = plus::io::open_output(schedule_path, "schedule csv");
      schedule.write_csv(out);
      manifest.outputs.push_back(schedule_path);
    }

    const plus::sim::Trajectory traj = plus::sim::integrate(
        plant, schedule, servo ? &*servo : nullptr, sim_cfg);

    const std::string traj_path = join(g.out_dir, "trajectory.csv");
    {
      auto out = plus::io::open_output(traj_path, "trajectory csv");
      plus::sim::write_trajectory_csv(out, traj, profile, sc.tower_height_m);
      manifest.outputs.push_back(traj_path);
    }

    plus::sim::TrackingMetrics metrics =
        plus::sim::clearance_metrics(traj, profile, sc.tower_height_m);
    metrics.saturated_count = schedule.saturated_count(0.0, profile.total_length());
    const plus::sim::VelocityDeviation vel = plus::sim::velocity_deviation(traj);

    json jm;
    jm["fraction_under_threshold"] = metrics.fraction_under;
    jm["clearance_threshold_m"] = metrics.threshold;
    jm["length_total_m"] = metrics.length_total;
    jm["length_under_m"] = metrics.length_under;
    jm["min_clearance_m"] = metrics.min_clearance;
    jm["max_clearance_m"] = metrics.max_clearance;
    jm["span_min_clearance_m"] = metrics.span_min_clearance;
    jm["saturated_schedule_samples"] = metrics.saturated_count;
    jm["max_abs_velocity_deviation"] = vel.max_abs;
    jm["rms_velocity_deviation"] = vel.rms;
    jm["phugoid_wavelength_m"] = plus::sim::phugoid_wavelength(ctx.derivs, 0.0);
    jm["samples"] = traj.size();
    const std::string metrics_path = join(g.out_dir, "metrics.json");
    {
      auto out = plus::io::open_output(metrics_path, "metrics json");
      out << jm.dump(2) << '\n';
      manifest.outputs.push_back(metrics_path);
    }
    std::cout << "simulate: fraction under " << metrics.threshold
              << " m band = " << metrics.fraction_under << " over "
              << metrics.length_total << " m\n";
  });
}

int cmd_sweep(const GlobalArgs& g, bool resume) {
  return run_with_manifest("sweep", g, [&](plus::cfg::RunConfig& cfg,
                                           plus::cfg::RunManifest& manifest) {
    plus::sweep::SweepConfig sw;
    sw.grid = cfg.sweep.grid();
    sw.master_seed = cfg.master_seed;
    sw.jobs = effective_jobs(g);
    sw.spans_per_run = cfg.sweep.spans_per_run;
    sw.dt = cfg.sweep.dt;
    sw.u0 = cfg.simulate.u0;
    sw.schedule_dx = cfg.sweep.schedule_dx_m;
    sw.jitter_u_frac = cfg.sweep.jitter_u_frac;
    sw.jitter_h_m = cfg.sweep.jitter_h_m;
    sw.divergence_bound = cfg.simulate.divergence_bound;
    sw.base_geometry = cfg.aircraft.geometry();
    sw.model_params = cfg.model.params();
    const std::size_t report_every = std::max<std::size_t>(1, sw.grid.cell_count() / 50);
    sw.progress = [report_every](std::size_t done, std::size_t total) {
      if (done % report_every == 0 || done == total)
        std::cerr << "\rsweep: " << done << "/" << total << " cells" << std::flush;
    };

    const std::string csv_path = join(g.out_dir, "sweep.csv");
    std::vector<plus::sweep::SweepRow> rows;
    if (resume && fs::exists(csv_path)) {
      std::vector<plus::sweep::SweepRow> prior;
      {
        auto in = plus::io::open_input(csv_path, "sweep csv");
        prior = plus::sweep::read_sweep_csv(in);
      }
      std::cerr << "sweep: resuming over " << prior.size() << " prior rows\n";
      rows = plus::sweep::run_sweep_resumed(sw, prior);
    } else {
      rows = plus::sweep::run_sweep(sw);
    }
    std::cerr << '\n';

    {
      auto out = plus::io::open_output(csv_path, "sweep csv");
      plus::sweep::write_sweep_csv(out, rows);
      manifest.outputs.push_back(csv_path);
    }
    const std::string trend_path = join(g.out_dir, "trends.csv");
    {
      auto out = plus::io::open_output(trend_path, "trend csv");
      plus::sweep::write_trend_csv(out, plus::sweep::aggregate_trends(rows));
      manifest.outputs.push_back(trend_path);
    }
    std::size_t failed = 0;
    for (const auto& r : rows)
      if (!r.ok) ++failed;
    std::cout << "sweep: " << rows.size() << " rows (" << failed << " failed) with "
              << sw.jobs << " jobs\n";
  });
}

int cmd_sysid(const GlobalArgs& g) {
  return run_with_manifest("sysid", g, [&](plus::cfg::RunConfig& cfg,
                                           plus::cfg::RunManifest& manifest) {
    const auto& sc = cfg.sysid;
    const plus::ident::ResponseRecord rec = plus::ident::generate_multistep(
        cfg.actuator.params, sc.amplitude_deg, sc.steps, sc.dwell_s, sc.noise_std,
        cfg.master_seed, sc.rate_hz);

    const std::string rec_path = join(g.out_dir, "sysid_response.csv");
    {
      auto out = plus::io::open_output(rec_path, "response csv");
      plus::ident::write_record_csv(out, rec);
      manifest.outputs.push_back(rec_path);
    }

    json fits = json::array();
    for (const auto structure : {plus::ident::ModelStructure::first_order,
                                 plus::ident::ModelStructure::second_order,
                                 plus::ident::ModelStructure::second_order_delay}) {
      const plus::ident::FitReport r = plus::ident::fit(rec, structure);
      json jr;
      jr["structure"] = plus::ident::to_string(r.structure);
      jr["gain"] = r.gain;
      jr["time_constant_s"] = r.time_constant;
      jr["damping"] = r.damping;
      jr["natural_freq_hz"] = r.natural_freq_hz;
      jr["delay_s"] = r.delay_s;
      jr["accuracy_pct"] = r.accuracy_pct;
      jr["converged"] = r.converged;
      fits.push_back(jr);
      std::cout << "sysid: " << plus::ident::to_string(r.structure) << " accuracy "
                << r.accuracy_pct << "%\n";
    }
    const std::string fit_path = join(g.out_dir, "sysid_fits.json");
    {
      auto out = plus::io::open_output(fit_path, "fit json");
      out << fits.dump(2) << '\n';
      manifest.outputs.push_back(fit_path);
    }
  });
}

int cmd_wavelength_map(const GlobalArgs& g, double sigma_max) {
  return run_with_manifest("wavelength_map", g, [&](plus::cfg::RunConfig& cfg,
                                                    plus::cfg::RunManifest& manifest) {
    if (!(sigma_max > 0.0))
      throw plus::cfg::ConfigError("wavelength-map: --sigma-max must be positive");
    const plus::aero::SyntheticModelParams params = cfg.model.params();
    const plus::aero::FlightCondition cond{cfg.simulate.u0};
    const std::string map_path = join(g.out_dir, "wavelength_map.csv");
    auto out = plus::io::open_output(map_path, "wavelength csv");
    out << "span_m,chord_m,sigma,lambda_ph_m\n";
    for (const double b : cfg.sweep.wingspans_m) {
      for (const double c : cfg.sweep.chords_m) {
        plus::aero::AircraftGeometry geom = cfg.aircraft.geometry();
        geom.span = b;
        geom.chord = c;
        const plus::aero::SyntheticAeroModel model(params, geom);
        for (const double s : {-sigma_max, 0.0, sigma_max}) {
          const double lambda = plus::sim::phugoid_wavelength(model, geom, cond, s);
          out << plus::io::format_double(b) << ',' << plus::io::format_double(c) << ','
              << plus::io::format_double(s) << ',' << plus::io::format_double(lambda)
              << '\n';
        }
      }
    }
    manifest.outputs.push_back(map_path);
    std::cout << "wavelength-map: " << cfg.sweep.wingspans_m.size() * cfg.sweep.chords_m.size() * 3
              << " rows\n";
  });
}

void print_line_class(const plus::env::LineClass& c) {
  auto band = [](double lo, double hi) {
    std::string s = plus::io::format_double(lo);
    s += " - ";
    s += std::isfinite(hi) ? plus::io::format_double(hi) : std::string("open");
    return s;
  };
  std::cout << c.name << ": voltage " << band(c.voltage_kv_min, c.voltage_kv_max)
            << " kV, tower height " << band(c.tower_height_min, c.tower_height_max)
            << " m, span " << band(c.span_min, c.span_max) << " m\n";
}

int cmd_env_catenary(double span, double sag_pct, double tower) {
  const double sag_fraction = sag_pct / 100.0;
  if (!(sag_fraction > 0.0) || !(sag_fraction < 100.0 / 100.0)) {
    std::cerr << "config error: --sag must be a percentage in (0, 100)\n";
    return 2;
  }
  double tower_height = tower;
  if (!(tower_height > 0.0)) tower_height = sag_fraction * span + 10.0;
  try {
    const plus::env::CatenarySpec spec =
        plus::env::solve_catenary_from_sag(span, sag_fraction, tower_height);
    std::cout << "catenary parameter a: " << plus::io::format_double(spec.a) << " m\n"
              << "sag depth: " << plus::io::format_double(spec.sag_depth()) << " m\n"
              << "midspan spatial frequency: "
              << plus::io::format_double(
                     plus::env::local_spatial_frequency(spec, 0.5 * span))
              << " rad/m\n";
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cmd_env_classes(std::optional<double> voltage_kv, std::optional<double> span_m) {
  try {
    if (voltage_kv) {
      print_line_class(plus::env::class_for_voltage(*voltage_kv));
    } else if (span_m) {
      print_line_class(plus::env::class_for_span(*span_m));
    } else {
      for (const auto& c : plus::env::kLineClasses) print_line_class(c);
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cmd_env_field(double current_a, double distance_m) {
  try {
    const double b = plus::env::wire_magnetic_field(current_a, distance_m);
    std::cout << "magnetic flux density: " << plus::io::format_double(b) << " T ("
              << plus::io::format_double(b * 1e6) << " uT)\n";
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flight-dynamics toolkit for powerline tracking with a morphing-wing UAV"};
  app.require_subcommand(1);

  GlobalArgs g;
  std::uint64_t seed_value = 0;
  int jobs_value = 0;
  app.add_option("--config", g.config_path, "JSON run configuration")->expected(1);
  app.add_option("--out-dir", g.out_dir, "output directory (created if missing)");
  auto* seed_opt = app.add_option("--seed", seed_value, "override the master seed");
  auto* jobs_opt =
      app.add_option("--jobs", jobs_value, "worker threads (sweep); PLUS_SIM_THREADS fallback")
          ->check(CLI::PositiveNumber);

  auto* sim_cmd = app.add_subcommand("simulate", "run one multi-span tracking simulation");
  sim_cmd->fallthrough();

  bool resume = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run the batch study over the geometry grid");
  sweep_cmd->fallthrough();
  sweep_cmd->add_flag("--resume", resume, "reuse finished rows from an existing sweep.csv");

  auto* sysid_cmd =
      app.add_subcommand("sysid", "generate bench data and fit actuator models");
  sysid_cmd->fallthrough();

  double map_sigma_max = 0.14;
  auto* map_cmd = app.add_subcommand("wavelength-map",
                                     "tabulate the slow-mode wavelength over the wing grid");
  map_cmd->fallthrough();
  map_cmd->add_option("--sigma-max", map_sigma_max, "morph amplitude for the map corners");

  auto* env_cmd = app.add_subcommand("env", "overhead-line environment queries");
  env_cmd->require_subcommand(1);
  env_cmd->fallthrough();

  double cat_span = 70.0, cat_sag = 2.0, cat_tower = 0.0;
  auto* cat_cmd = env_cmd->add_subcommand("catenary", "solve a span from sag percentage");
  cat_cmd->add_option("--span", cat_span, "span length [m]")->check(CLI::PositiveNumber);
  cat_cmd->add_option("--sag", cat_sag, "sag as percent of span");
  cat_cmd->add_option("--tower", cat_tower, "tower height [m] (default: sag depth + 10)");

  std::optional<double> cls_voltage, cls_span;
  auto* cls_cmd = env_cmd->add_subcommand("classes", "look up the line-class table");
  cls_cmd->add_option("--voltage", cls_voltage, "nominal voltage [kV]");
  cls_cmd->add_option("--span", cls_span, "span length [m]");

  double field_current = 628.0, field_distance = 1.0;
  auto* field_cmd = env_cmd->add_subcommand("field", "straight-wire magnetic flux density");
  field_cmd->add_option("--current", field_current, "conductor current [A]");
  field_cmd->add_option("--distance", field_distance, "radial distance [m]")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (seed_opt->count() > 0) g.seed = seed_value;
  if (jobs_opt->count() > 0) g.jobs = jobs_value;

  if (sim_cmd->parsed()) return cmd_simulate(g);
  if (sweep_cmd->parsed()) return cmd_sweep(g, resume);
  if (sysid_cmd->parsed()) return cmd_sysid(g);
  if (map_cmd->parsed()) return cmd_wavelength_map(g, map_sigma_max);
  if (env_cmd->parsed()) {
    if (cat_cmd->parsed()) return cmd_env_catenary(cat_span, cat_sag, cat_tower);
    if (cls_cmd->parsed()) return cmd_env_classes(cls_voltage, cls_span);
    if (field_cmd->parsed()) return cmd_env_field(field_current, field_distance);
  }
  std::cerr << "error: no subcommand dispatched\n";
  return 2;
}
