#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "plus/config.hpp"
#include "plus/controller.hpp"
#include "plus/simulator.hpp"

using namespace plus;

namespace {

aero::PlantMatrices reference_plant() {
  return cfg::load_plant_file(std::string(PLUS_DATA_DIR) + "/reference_plant.json");
}

}  // namespace

TEST_CASE("fixed-step integrator shows fourth-order convergence") {
  const aero::PlantMatrices p = reference_plant();
  const aero::Matrix5d m = p.A;
  sim::Vector5d x0;
  x0 << -0.75, 0.1, 0.0, 0.02, 0.0;

  const double period = 2.0 * std::numbers::pi / 0.8526;  // slow-mode cycle
  const sim::Vector5d truth = (m * period).exp() * x0;

  auto run = [&](int steps) {
    sim::Vector5d v = x0;
    double x = 0.0;
    const double dt = period / steps;
    for (int k = 0; k < steps; ++k) sim::rk4_step(m, 25.0, dt, v, x);
    return (v - truth).norm();
  };

  const double e1 = run(128);
  const double e2 = run(256);
  const double e4 = run(512);
  const double order12 = std::log2(e1 / e2);
  const double order24 = std::log2(e2 / e4);
  REQUIRE(order12 > 3.9);
  REQUIRE(order12 < 4.5);
  REQUIRE(order24 > 3.9);
}

TEST_CASE("frozen morph state reproduces the matrix-exponential solution") {
  const aero::PlantMatrices p = reference_plant();
  const double sigma = 0.03;

  sim::SimConfig cfg;
  cfg.dt = 2e-4;
  cfg.u0 = 25.0;
  cfg.x_end = 25.0;
  cfg.initial_state << -0.75, 0.0, 0.0, 0.0, 0.0;

  const sim::Trajectory traj =
      sim::integrate(p, [sigma](double) { return sigma; }, nullptr, cfg);
  const auto& last = traj.back();
  const aero::Matrix5d m = p.A + sigma * p.B_sigma;
  const sim::Vector5d truth = (m * last.t).exp() * cfg.initial_state;
  REQUIRE((last.state() - truth).norm() < 1e-8);
  REQUIRE(last.sigma_cmd == sigma);
  REQUIRE(last.sigma_achieved == sigma);
}

TEST_CASE("zero state with a neutral command stays identically at rest") {
  const aero::PlantMatrices p = reference_plant();
  sim::SimConfig cfg;
  cfg.x_end = 50.0;
  const sim::Trajectory traj = sim::integrate(p, [](double) { return 0.0; }, nullptr, cfg);
  for (const auto& s : traj) {
    REQUIRE(s.u == 0.0);
    REQUIRE(s.h == 0.0);
    REQUIRE(s.theta == 0.0);
  }
  // position advances at exactly the trim speed
  REQUIRE(traj.back().x >= 50.0);
}

TEST_CASE("a state leaving the bound raises a located divergence error") {
  const aero::PlantMatrices p = reference_plant();
  sim::SimConfig cfg;
  cfg.x_end = 100.0;
  cfg.initial_state << -0.75, 0.0, 0.0, 0.0, 0.0;
  cfg.divergence_bound = 0.5;
  try {
    sim::integrate(p, [](double) { return 0.0; }, nullptr, cfg);
    FAIL("expected a divergence error");
  } catch (const sim::DivergenceError& e) {
    REQUIRE(e.time() > 0.0);
    REQUIRE(e.position() > 0.0);
    REQUIRE(std::string(e.what()).find("bound") != std::string::npos);
  }
}

TEST_CASE("no along-track progress raises a stall error") {
  aero::PlantMatrices p;  // zero dynamics: the state never changes
  sim::SimConfig cfg;
  cfg.x_end = 25.0;
  cfg.initial_state << -24.9, 0.0, 0.0, 0.0, 0.0;  // crawling at 0.1 m/s
  REQUIRE_THROWS_AS(sim::integrate(p, [](double) { return 0.0; }, nullptr, cfg),
                    sim::DivergenceError);
}

TEST_CASE("a run resumed from any recorded sample reproduces the tail bitwise") {
  const aero::PlantMatrices p = reference_plant();
  sim::SimConfig cfg;
  cfg.x_end = 60.0;
  cfg.initial_state << -0.75, 0.0, 0.0, 0.0, 0.0;
  auto schedule = [](double x) { return x > 30.0 ? 0.02 : -0.01; };
  const sim::Trajectory full = sim::integrate(p, schedule, nullptr, cfg);

  const std::size_t k = full.size() / 3;
  sim::SimConfig tail_cfg = cfg;
  tail_cfg.start_x = full[k].x;
  tail_cfg.start_t = full[k].t;
  tail_cfg.initial_state = full[k].state();
  const sim::Trajectory tail = sim::integrate(p, schedule, nullptr, tail_cfg);

  REQUIRE(tail.size() == full.size() - k);
  for (std::size_t i = 0; i < tail.size(); ++i) {
    REQUIRE(tail[i].t == full[k + i].t);
    REQUIRE(tail[i].x == full[k + i].x);
    REQUIRE(tail[i].u == full[k + i].u);
    REQUIRE(tail[i].h == full[k + i].h);
  }
}

TEST_CASE("clearance accounting splits the track at the threshold band") {
  const env::PowerlineProfile profile = env::uniform_profile(1, 70.0, 30.0, 0.02);
  sim::Trajectory traj;
  for (double x = 0.0; x <= 70.0 + 1e-9; x += 0.01) {
    sim::TrajectorySample s;
    s.x = x;
    s.h = 0.0;  // level flight at the tower datum
    traj.push_back(s);
  }
  const sim::TrackingMetrics m = sim::clearance_metrics(traj, profile, 30.0);
  REQUIRE(m.length_total == Catch::Approx(70.0).margin(1e-6));
  // the wire dips more than 1 m below the datum only around midspan
  REQUIRE(m.fraction_under == Catch::Approx(0.4654).margin(0.005));
  REQUIRE(m.min_clearance == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(m.max_clearance == Catch::Approx(1.4).margin(1e-4));
  REQUIRE(m.span_min_clearance.size() == 1);
  REQUIRE(m.span_min_clearance[0] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("clearance accounting requires full profile coverage") {
  const env::PowerlineProfile profile = env::uniform_profile(1, 70.0, 30.0, 0.02);
  sim::Trajectory traj;
  for (double x = 0.0; x <= 35.0; x += 0.5) {
    sim::TrajectorySample s;
    s.x = x;
    traj.push_back(s);
  }
  REQUIRE_THROWS_AS(sim::clearance_metrics(traj, profile, 30.0), std::invalid_argument);
}

TEST_CASE("velocity deviation summarizes the airspeed excursion") {
  sim::Trajectory traj;
  for (double u : {-0.3, 0.4, -0.5, 0.0}) {
    sim::TrajectorySample s;
    s.u = u;
    traj.push_back(s);
  }
  const sim::VelocityDeviation d = sim::velocity_deviation(traj);
  REQUIRE(d.max_abs == Catch::Approx(0.5));
  REQUIRE(d.rms == Catch::Approx(std::sqrt((0.09 + 0.16 + 0.25) / 4.0)));
}

TEST_CASE("slow-mode wavelength combines speed and modal frequency") {
  const aero::StabilityDerivatives d = aero::extract_derivatives(reference_plant());
  const double lambda = sim::phugoid_wavelength(d, 0.0);
  REQUIRE(lambda == Catch::Approx(25.0 / std::sqrt(9.81 * 1.535 / 25.0)).epsilon(1e-12));
  REQUIRE(lambda == Catch::Approx(32.21).margin(0.01));
}

TEST_CASE("trajectory csv starts with the canonical column header") {
  const env::PowerlineProfile profile = env::uniform_profile(1, 70.0, 30.0, 0.02);
  sim::Trajectory traj;
  for (double x : {0.0, 35.0, 70.0}) {
    sim::TrajectorySample s;
    s.x = x;
    traj.push_back(s);
  }
  std::ostringstream out;
  sim::write_trajectory_csv(out, traj, profile, 30.0);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "t,x,u,w,q,theta,h,sigma_cmd,sigma_achieved,wire_height,clearance");
  std::string row;
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  REQUIRE(rows == 3);
}
