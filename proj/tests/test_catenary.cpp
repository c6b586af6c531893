#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "plus/catenary.hpp"
#include "plus/rootfind.hpp"

using namespace plus;

TEST_CASE("sag solve reproduces the 70 m / 2% reference parameter") {
  const auto s = env::solve_catenary_from_sag(70.0, 0.02, 30.0);
  // independently computed with 200 bisection steps on the sag equation
  REQUIRE(s.a == Catch::Approx(437.7331345326079).epsilon(1e-12));
  REQUIRE(s.sag_depth() == Catch::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("sag solve satisfies its defining equation across the study grid") {
  for (const double L : {40.0, 70.0, 100.0, 300.0, 500.0}) {
    for (int pct = 1; pct <= 5; ++pct) {
      const double sf = pct / 100.0;
      const auto s = env::solve_catenary_from_sag(L, sf, 0.3 * L);
      const double resid = s.a * (std::cosh(L / (2.0 * s.a)) - 1.0) - sf * L;
      REQUIRE(std::abs(resid) < 1e-9 * L);

      // cross-check against bracketed bisection on the same residual
      auto f = [&](double a) { return a * (std::cosh(L / (2.0 * a)) - 1.0) - sf * L; };
      const auto b = num::bisect(f, 1e-2 * L, 1e3 * L, 1e-12 * L);
      REQUIRE(s.a == Catch::Approx(b.x).epsilon(1e-8));
    }
  }
}

TEST_CASE("raw ordinate is symmetric with its minimum at midspan") {
  const auto s = env::solve_catenary_from_sag(70.0, 0.02, 30.0);
  REQUIRE(env::raw_ordinate(s, 0.0) == Catch::Approx(env::raw_ordinate(s, 70.0)));
  REQUIRE(env::raw_ordinate(s, 35.0) == Catch::Approx(s.a));
  REQUIRE(env::raw_ordinate(s, 10.0) > env::raw_ordinate(s, 20.0));
  REQUIRE(env::raw_ordinate(s, 20.0) > env::raw_ordinate(s, 35.0));
}

TEST_CASE("wire height hits the towers at both ends and sags in between") {
  const auto s = env::solve_catenary_from_sag(70.0, 0.02, 30.0);
  REQUIRE(env::height_above_ground(s, 0.0) == Catch::Approx(30.0).margin(1e-9));
  REQUIRE(env::height_above_ground(s, 70.0) == Catch::Approx(30.0).margin(1e-9));
  REQUIRE(env::height_above_ground(s, 35.0) == Catch::Approx(30.0 - 1.4).margin(1e-9));
  for (double x = 1.0; x < 70.0; x += 1.0)
    REQUIRE(env::height_above_ground(s, x) < 30.0);
}

TEST_CASE("curvature radius is smallest at midspan and equals the parameter there") {
  const auto s = env::solve_catenary_from_sag(70.0, 0.02, 30.0);
  REQUIRE(env::curvature_radius(s, 35.0) == Catch::Approx(s.a));
  REQUIRE(env::curvature_radius(s, 0.0) > env::curvature_radius(s, 35.0));
}

TEST_CASE("local spatial frequency vanishes at the span start and grows along it") {
  const auto s = env::solve_catenary_from_sag(70.0, 0.02, 30.0);
  REQUIRE(env::local_spatial_frequency(s, 0.0) == 0.0);
  double prev = 0.0;
  for (double x = 5.0; x <= 70.0; x += 5.0) {
    const double w = env::local_spatial_frequency(s, x);
    REQUIRE(w == Catch::Approx(x / env::raw_ordinate(s, x)));
    REQUIRE(w > prev);
    prev = w;
  }
}

TEST_CASE("span geometry rejects out-of-range queries and bad parameters") {
  const auto s = env::solve_catenary_from_sag(70.0, 0.02, 30.0);
  REQUIRE_THROWS_AS(env::raw_ordinate(s, -0.1), std::domain_error);
  REQUIRE_THROWS_AS(env::raw_ordinate(s, 70.1), std::domain_error);
  REQUIRE_THROWS_AS(env::solve_catenary_from_sag(-70.0, 0.02, 30.0), std::invalid_argument);
  REQUIRE_THROWS_AS(env::solve_catenary_from_sag(70.0, 0.0, 30.0), std::invalid_argument);
  REQUIRE_THROWS_AS(env::solve_catenary_from_sag(70.0, 1.5, 30.0), std::invalid_argument);
  // tower shorter than the sag depth cannot hold the wire above ground
  REQUIRE_THROWS_AS(env::solve_catenary_from_sag(70.0, 0.02, 1.0), std::invalid_argument);
}
