#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "plus/config.hpp"
#include "plus/controller.hpp"
#include "plus/powerline.hpp"

using namespace plus;

namespace {

aero::StabilityDerivatives reference_derivs() {
  const aero::PlantMatrices p =
      cfg::load_plant_file(std::string(PLUS_DATA_DIR) + "/reference_plant.json");
  return aero::extract_derivatives(p);
}

ctrl::MatchingContext reference_context() {
  ctrl::MatchingContext ctx;
  ctx.derivs = reference_derivs();
  ctx.u0 = 25.0;
  ctx.catenary = env::solve_catenary_from_sag(70.0, 0.02, 30.0);
  ctx.sigma_lo = -0.032;
  ctx.sigma_hi = 0.055;
  return ctx;
}

}  // namespace

TEST_CASE("slow-mode frequency follows the speed-damping approximation") {
  const aero::StabilityDerivatives d = reference_derivs();
  REQUIRE(ctrl::phugoid_frequency(d, 0.0) ==
          Catch::Approx(std::sqrt(9.81 * 1.535 / 25.0)).epsilon(1e-12));
  // thickening (negative Zu slope) stiffens the mode
  REQUIRE(ctrl::phugoid_frequency(d, 0.04) > ctrl::phugoid_frequency(d, 0.0));
  REQUIRE(ctrl::phugoid_frequency(d, -0.03) < ctrl::phugoid_frequency(d, 0.0));
}

TEST_CASE("frequency evaluation rejects a non-oscillatory state") {
  aero::StabilityDerivatives d = reference_derivs();
  const double sigma_flip = -d.Zu / d.Zu_s;  // radicand crosses zero here
  REQUIRE_THROWS_AS(ctrl::phugoid_frequency(d, sigma_flip * 1.5), std::domain_error);
  // the rectified variant keeps returning a magnitude instead
  REQUIRE(ctrl::phugoid_frequency_rectified(d, sigma_flip * 1.5) > 0.0);
  REQUIRE(ctrl::phugoid_frequency_rectified(d, 0.0) ==
          Catch::Approx(ctrl::phugoid_frequency(d, 0.0)));
}

TEST_CASE("matching requirement scales the wire spatial frequency by airspeed") {
  const ctrl::MatchingContext ctx = reference_context();
  REQUIRE(ctrl::matching_requirement(ctx, 0.0) == 0.0);
  const double x = 20.0;
  REQUIRE(ctrl::matching_requirement(ctx, x) ==
          Catch::Approx(25.0 * env::local_spatial_frequency(ctx.catenary, x)));
}

TEST_CASE("required morph command closes the frequency match when feasible") {
  const ctrl::MatchingContext ctx = reference_context();
  int unsaturated = 0;
  for (double x = 0.5; x <= 70.0; x += 0.5) {
    const ctrl::SigmaCommand c = ctrl::required_sigma(ctx, x);
    REQUIRE(c.sigma >= ctx.sigma_lo);
    REQUIRE(c.sigma <= ctx.sigma_hi);
    if (!c.saturated) {
      ++unsaturated;
      const double achieved = ctrl::phugoid_frequency(ctx.derivs, c.sigma);
      const double wanted = ctrl::matching_requirement(ctx, x);
      REQUIRE(achieved == Catch::Approx(wanted).epsilon(1e-8));
    }
  }
  REQUIRE(unsaturated > 0);  // the feasible window sits mid-span
}

TEST_CASE("morph command saturates at the nearest bound outside the window") {
  const ctrl::MatchingContext ctx = reference_context();
  // near the span start the requirement is slower than the thinnest state
  const ctrl::SigmaCommand lo = ctrl::required_sigma(ctx, 1.0);
  REQUIRE(lo.saturated);
  REQUIRE(lo.sigma == ctx.sigma_lo);
  // near the tower it is faster than the thickest state
  const ctrl::SigmaCommand hi = ctrl::required_sigma(ctx, 69.0);
  REQUIRE(hi.saturated);
  REQUIRE(hi.sigma == ctx.sigma_hi);
}

TEST_CASE("closed-form saturation boundary agrees with the solver") {
  const ctrl::MatchingContext ctx = reference_context();
  // sigma* = (K - |Zu|) / |Zu_s| with K = Zq * w^2 / g maps a requirement to
  // its exact morph command for the constant-slope model
  int checked = 0;
  for (double x : {13.5, 14.0}) {
    const double w = ctrl::matching_requirement(ctx, x);
    const double k = ctx.derivs.Zq * w * w / ctx.derivs.gravity;
    const double closed = (k - std::abs(ctx.derivs.Zu)) / std::abs(ctx.derivs.Zu_s);
    const ctrl::SigmaCommand c = ctrl::required_sigma(ctx, x);
    if (!c.saturated) {
      REQUIRE(c.sigma == Catch::Approx(closed).margin(1e-9));
      ++checked;
    }
  }
  REQUIRE(checked > 0);
}

TEST_CASE("gating floor forces a neutral command at slow requirements") {
  ctrl::MatchingContext ctx = reference_context();
  ctx.gating_floor = 0.5;  // rad/s
  const env::PowerlineProfile profile(std::vector<env::CatenarySpec>{ctx.catenary});
  const ctrl::MorphSchedule sched = ctrl::build_schedule(ctx, profile, 0.5);
  // early samples sit under the floor: neutral and unsaturated
  const auto& e0 = sched.entries().front();
  REQUIRE(e0.sigma == 0.0);
  REQUIRE_FALSE(e0.saturated);
}

TEST_CASE("schedule holds each command until the next sample point") {
  const ctrl::MatchingContext ctx = reference_context();
  const env::PowerlineProfile profile = env::uniform_profile(2, 70.0, 30.0, 0.02);
  const ctrl::MorphSchedule sched = ctrl::build_schedule(ctx, profile, 0.5);

  REQUIRE(sched.sigma_at(0.0) == 0.0);   // no command before the first sample
  REQUIRE(sched.sigma_at(0.49) == 0.0);
  const double first = sched.sigma_at(0.5);
  REQUIRE(sched.sigma_at(0.7) == first); // zero-order hold
  REQUIRE(sched.sigma_at(0.999) == first);
  // the held entry is the one sampled at 0.5 until the next knot takes over
  REQUIRE(sched.entry_at(0.7).x == Catch::Approx(0.5));
  REQUIRE(sched.entry_at(1.0).x == Catch::Approx(1.0));
}

TEST_CASE("schedule restarts from neutral at every tower crossing") {
  const ctrl::MatchingContext ctx = reference_context();
  const env::PowerlineProfile profile = env::uniform_profile(2, 70.0, 30.0, 0.02);
  const ctrl::MorphSchedule sched = ctrl::build_schedule(ctx, profile, 0.5);

  // between the tower and the next sample the command drops back to neutral
  REQUIRE(sched.sigma_at(70.2) == 0.0);
  // identical spans produce identical span-local commands
  REQUIRE(sched.sigma_at(70.5) == Catch::Approx(sched.sigma_at(0.5)));
  REQUIRE(sched.sigma_at(105.0) == Catch::Approx(sched.sigma_at(35.0)));

  // reset markers on the first sample of each span only
  int resets = 0;
  for (const auto& e : sched.entries())
    if (e.reset) ++resets;
  REQUIRE(resets == 2);
  REQUIRE(sched.entries().front().reset);
}

TEST_CASE("schedule csv lists position, command and flags") {
  const ctrl::MatchingContext ctx = reference_context();
  const env::PowerlineProfile profile(std::vector<env::CatenarySpec>{ctx.catenary});
  const ctrl::MorphSchedule sched = ctrl::build_schedule(ctx, profile, 0.5);
  std::ostringstream out;
  sched.write_csv(out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "x,sigma,saturated_flag,reset_marker");
  std::string row;
  std::getline(in, row);
  REQUIRE(row.substr(0, 4) == "0.5,");
  std::size_t rows = 1;
  while (std::getline(in, row)) ++rows;
  REQUIRE(rows == sched.entries().size());
}

TEST_CASE("saturated sample counting respects the query window") {
  const ctrl::MatchingContext ctx = reference_context();
  const env::PowerlineProfile profile(std::vector<env::CatenarySpec>{ctx.catenary});
  const ctrl::MorphSchedule sched = ctrl::build_schedule(ctx, profile, 0.5);
  long manual = 0;
  for (const auto& e : sched.entries())
    if (e.saturated) ++manual;
  REQUIRE(sched.saturated_count(0.0, 70.0) == manual);
  REQUIRE(sched.saturated_count(0.0, 70.0) >
          sched.saturated_count(13.0, 15.0));  // the feasible window is unsaturated
  REQUIRE(manual > 0);
}
