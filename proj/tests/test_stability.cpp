#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "plus/config.hpp"
#include "plus/polar.hpp"
#include "plus/stability.hpp"

using namespace plus;

namespace {

cfg::RunConfig reference_config() {
  return cfg::load_run_config(std::string(PLUS_DATA_DIR) + "/reference.json");
}

}  // namespace

TEST_CASE("altitude row rewrite supports both published conventions") {
  aero::Matrix5d a = aero::Matrix5d::Zero();
  a(4, 2) = 99.0;  // stale content must be cleared
  const aero::Matrix5d climb = aero::h_row_applied(a, aero::HRowConvention::climb_rate, 25.0);
  REQUIRE(climb(4, 0) == 0.0);
  REQUIRE(climb(4, 1) == -1.0);
  REQUIRE(climb(4, 2) == 0.0);
  REQUIRE(climb(4, 3) == 25.0);
  const aero::Matrix5d range = aero::h_row_applied(a, aero::HRowConvention::range_rate, 25.0);
  REQUIRE(range(4, 0) == 1.0);
  REQUIRE(range(4, 1) == 0.0);
  REQUIRE(range(4, 3) == 0.0);
}

TEST_CASE("plant assembly and derivative extraction round-trip") {
  aero::StabilityDerivatives d;
  d.Xu = -0.074; d.Xw = -0.122;
  d.Zu = -1.535; d.Zw = -7.457; d.Zq = 25.0;
  d.Mu = 2.689; d.Mw = -5.850; d.Mq = -32.945;
  d.Xu_s = -0.332; d.Xw_s = -2.096;
  d.Zu_s = -3.960; d.Zw_s = -15.336;
  d.Mu_s = 25.329; d.Mw_s = 95.192; d.Mq_s = -160.32;
  d.u0 = 25.0;

  const aero::PlantMatrices p = aero::assemble_plant(d, aero::HRowConvention::range_rate);
  REQUIRE(p.A(0, 3) == Catch::Approx(-9.81));
  REQUIRE(p.A(3, 2) == 1.0);
  REQUIRE(p.A(4, 0) == 1.0);
  const aero::StabilityDerivatives e = aero::extract_derivatives(p);
  REQUIRE(e.Zu == Catch::Approx(d.Zu));
  REQUIRE(e.Mq == Catch::Approx(d.Mq));
  REQUIRE(e.Zu_s == Catch::Approx(d.Zu_s));
  REQUIRE(e.u0 == Catch::Approx(25.0));
}

TEST_CASE("bundled coefficient model trims level at zero incidence") {
  const cfg::RunConfig cfg = reference_config();
  const aero::AircraftGeometry geom = cfg.aircraft.geometry();
  const aero::SyntheticAeroModel model(cfg.model.params(), geom);
  const aero::FlightCondition cond{cfg.simulate.u0};
  const aero::TrimState trim = aero::trim_state(model, geom, cond);
  REQUIRE(std::abs(trim.alpha) < 1e-10);
  // the trim lift coefficient carries the full weight
  const double qs = cond.dynamic_pressure() * geom.wing_area();
  const double cl = model.eval(trim.alpha, 0.0, 0.0).CL;
  REQUIRE(qs * cl == Catch::Approx(geom.mass * cond.gravity).epsilon(1e-9));
  REQUIRE(trim.thrust == Catch::Approx(qs * model.eval(trim.alpha, 0.0, 0.0).CD).epsilon(1e-6));
}

TEST_CASE("trim incidence rises when the aircraft gets heavier") {
  const cfg::RunConfig cfg = reference_config();
  aero::AircraftGeometry geom = cfg.aircraft.geometry();
  const aero::SyntheticAeroModel model(cfg.model.params(), geom);
  const aero::FlightCondition cond{cfg.simulate.u0};
  const double a0 = aero::trim_state(model, geom, cond).alpha;
  geom.mass *= 1.3;
  const double a1 = aero::trim_state(model, geom, cond).alpha;
  REQUIRE(a1 > a0);
}

TEST_CASE("derived plant reproduces the bundled reference matrices") {
  const cfg::RunConfig cfg = reference_config();
  const aero::AircraftGeometry geom = cfg.aircraft.geometry();
  const aero::SyntheticAeroModel model(cfg.model.params(), geom);
  const aero::FlightCondition cond{cfg.simulate.u0};
  const aero::StabilityDerivatives d = aero::derive_stability_matrices(model, geom, cond);
  const aero::PlantMatrices derived = aero::assemble_plant(d, aero::HRowConvention::range_rate);

  const aero::PlantMatrices ref =
      cfg::load_plant_file(std::string(PLUS_DATA_DIR) + "/reference_plant.json");
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      const double tol = 1e-9 * std::max(1.0, std::abs(ref.A(r, c)));
      REQUIRE_THAT(derived.A(r, c), Catch::Matchers::WithinAbs(ref.A(r, c), tol));
      const double tol_b = 1e-9 * std::max(1.0, std::abs(ref.B_sigma(r, c)));
      REQUIRE_THAT(derived.B_sigma(r, c),
                   Catch::Matchers::WithinAbs(ref.B_sigma(r, c), tol_b));
    }
}

TEST_CASE("table-driven derivation agrees with the closed-form model path") {
  const cfg::RunConfig cfg = reference_config();
  const aero::AircraftGeometry geom = cfg.aircraft.geometry();
  const aero::SyntheticModelParams params = cfg.model.params();
  const aero::SyntheticAeroModel model(params, geom);
  const aero::FlightCondition cond{cfg.simulate.u0};
  const double alpha0 = aero::trim_state(model, geom, cond).alpha;

  const aero::PolarTable table = aero::make_polar_table(
      model, {-0.04, -0.02, 0.0, 0.02, 0.04}, {-0.15, -0.05, 0.0, 0.05, 0.15, 0.25});
  aero::AuxiliaryDerivatives aux;
  aux.CLV = params.CLV;
  aux.CDV = params.CDV;
  aux.CmV = params.CmV;
  aux.Cmq = params.Cmq;
  aux.Cmq_mu = params.Cmq_mu;

  const aero::StabilityDerivatives dm = aero::derive_stability_matrices(model, geom, cond);
  const aero::StabilityDerivatives dt =
      aero::derive_stability_matrices(table, aux, geom, cond, alpha0);

  // the model is affine in alpha and quadratic in sigma, both captured exactly
  // by bilinear nodes plus central differences
  REQUIRE(dt.Xu == Catch::Approx(dm.Xu).margin(1e-9));
  REQUIRE(dt.Zu == Catch::Approx(dm.Zu).margin(1e-9));
  REQUIRE(dt.Zw == Catch::Approx(dm.Zw).margin(1e-9));
  REQUIRE(dt.Mw == Catch::Approx(dm.Mw).margin(1e-9));
  REQUIRE(dt.Mq == Catch::Approx(dm.Mq).margin(1e-9));
  REQUIRE(dt.Zu_s == Catch::Approx(dm.Zu_s).margin(1e-7));
  REQUIRE(dt.Mw_s == Catch::Approx(dm.Mw_s).margin(1e-6));
  REQUIRE(dt.Mq_s == Catch::Approx(dm.Mq_s).margin(1e-6));
}

TEST_CASE("five-point slope fit equals the two-point slope on affine data") {
  const cfg::RunConfig cfg = reference_config();
  const aero::AircraftGeometry geom = cfg.aircraft.geometry();
  const aero::SyntheticModelParams params = cfg.model.params();
  const aero::SyntheticAeroModel model(params, geom);
  const aero::FlightCondition cond{cfg.simulate.u0};
  const double alpha0 = aero::trim_state(model, geom, cond).alpha;
  const aero::PolarTable table = aero::make_polar_table(
      model, {-0.04, -0.02, 0.0, 0.02, 0.04}, {-0.15, -0.05, 0.0, 0.05, 0.15, 0.25});
  aero::AuxiliaryDerivatives aux;
  aux.CLV = params.CLV;
  aux.CDV = params.CDV;
  aux.CmV = params.CmV;
  aux.Cmq = params.Cmq;
  aux.Cmq_mu = params.Cmq_mu;
  const aero::StabilityDerivatives d2 = aero::derive_stability_matrices(
      table, aux, geom, cond, alpha0, 0.0, aero::SlopeFit::central_difference);
  const aero::StabilityDerivatives d5 = aero::derive_stability_matrices(
      table, aux, geom, cond, alpha0, 0.0, aero::SlopeFit::five_point_least_squares);
  REQUIRE(d5.Zw == Catch::Approx(d2.Zw).margin(1e-9));
  REQUIRE(d5.Mw == Catch::Approx(d2.Mw).margin(1e-9));
}

TEST_CASE("morphing about a nonzero state keeps the sensitivity asymmetry") {
  const cfg::RunConfig cfg = reference_config();
  const aero::AircraftGeometry geom = cfg.aircraft.geometry();
  const aero::SyntheticAeroModel model(cfg.model.params(), geom);
  const aero::FlightCondition cond{cfg.simulate.u0};
  const aero::StabilityDerivatives d_plus =
      aero::derive_stability_matrices(model, geom, cond, 0.05);
  const aero::StabilityDerivatives d_minus =
      aero::derive_stability_matrices(model, geom, cond, -0.05);
  // growth > 0: thickening moves Zu further than thinning
  const aero::StabilityDerivatives d0 = aero::derive_stability_matrices(model, geom, cond);
  REQUIRE(std::abs(d_plus.Zu - d0.Zu) > std::abs(d_minus.Zu - d0.Zu));
}
