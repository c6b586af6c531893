#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "plus/rootfind.hpp"

using plus::num::bisect;
using plus::num::golden_min;
using plus::num::newton;

TEST_CASE("newton solves a smooth scalar root") {
  auto f = [](double x) { return x * x - 2.0; };
  auto df = [](double x) { return 2.0 * x; };
  const auto r = newton(f, df, 1.0, 1e-14, 50);
  REQUIRE(r.converged);
  REQUIRE(r.x == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(std::abs(r.residual) < 1e-12);
}

TEST_CASE("newton reports non-convergence instead of throwing") {
  auto f = [](double x) { return x * x + 1.0; };  // no real root
  auto df = [](double x) { return 2.0 * x; };
  const auto r = newton(f, df, 0.5, 1e-14, 25);
  REQUIRE_FALSE(r.converged);
}

TEST_CASE("bisect finds a bracketed root regardless of orientation") {
  auto f = [](double x) { return std::cos(x); };
  const auto a = bisect(f, 0.0, 3.0, 1e-12);
  REQUIRE(a.x == Catch::Approx(std::acos(0.0)).margin(1e-10));
  const auto b = bisect(f, 3.0, 0.0, 1e-12);
  REQUIRE(b.x == Catch::Approx(a.x).margin(1e-10));
}

TEST_CASE("bisect rejects an interval without a sign change") {
  auto f = [](double x) { return x * x + 1.0; };
  REQUIRE_THROWS_AS(bisect(f, -1.0, 1.0, 1e-12), std::invalid_argument);
}

TEST_CASE("golden section localizes a smooth minimum") {
  auto f = [](double x) { return (x - 0.3) * (x - 0.3) + 1.0; };
  const double x = golden_min(f, -1.0, 2.0, 1e-10);
  REQUIRE(x == Catch::Approx(0.3).margin(1e-8));
}
