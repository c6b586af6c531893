#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

#include "plus/powerline.hpp"

using namespace plus;

TEST_CASE("voltage class lookup covers the tabulated bands") {
  REQUIRE(std::string(env::class_for_voltage(0.4).name) == "LV");
  REQUIRE(std::string(env::class_for_voltage(1.0).name) == "LV");
  REQUIRE(std::string(env::class_for_voltage(11.0).name) == "MV");
  REQUIRE(std::string(env::class_for_voltage(69.0).name) == "MV");
  REQUIRE(std::string(env::class_for_voltage(110.0).name) == "HV");
  REQUIRE(std::string(env::class_for_voltage(230.0).name) == "HV");
  REQUIRE(std::string(env::class_for_voltage(400.0).name) == "EHV");
  REQUIRE(std::string(env::class_for_voltage(800.0).name) == "UHV");
  REQUIRE(std::string(env::class_for_voltage(1100.0).name) == "UHV");
}

TEST_CASE("voltage class lookup rejects the untabulated band") {
  REQUIRE_THROWS_AS(env::class_for_voltage(600.0), std::domain_error);
  REQUIRE_THROWS_AS(env::class_for_voltage(-1.0), std::invalid_argument);
}

TEST_CASE("span class lookup returns the first matching band") {
  REQUIRE(std::string(env::class_for_span(40.0).name) == "LV");
  REQUIRE(std::string(env::class_for_span(100.0).name) == "MV");
  REQUIRE(std::string(env::class_for_span(300.0).name) == "HV");
  REQUIRE(std::string(env::class_for_span(450.0).name) == "EHV");
  REQUIRE(std::string(env::class_for_span(600.0).name) == "UHV");
  REQUIRE_THROWS_AS(env::class_for_span(10.0), std::domain_error);
}

TEST_CASE("straight-wire field matches the textbook value at bench conditions") {
  const double b = env::wire_magnetic_field(628.0, 1.0);
  REQUIRE(b * 1e6 == Catch::Approx(125.6).margin(0.1));
  // inverse-distance falloff
  REQUIRE(env::wire_magnetic_field(628.0, 2.0) == Catch::Approx(b / 2.0));
  REQUIRE_THROWS_AS(env::wire_magnetic_field(628.0, 0.0), std::invalid_argument);
}

TEST_CASE("multi-span profile stitches identical spans end to end") {
  const auto p = env::uniform_profile(4, 70.0, 30.0, 0.02);
  REQUIRE(p.span_count() == 4);
  REQUIRE(p.total_length() == Catch::Approx(280.0));
  REQUIRE(p.tower_positions().size() == 5);
  REQUIRE(p.tower_positions()[2] == Catch::Approx(140.0));

  // wire height repeats with the span period
  for (double x = 0.0; x <= 70.0; x += 3.5)
    REQUIRE(p.wire_height_at(x) == Catch::Approx(p.wire_height_at(x + 140.0)).margin(1e-9));

  // attachment points at every tower
  for (const double tx : p.tower_positions())
    REQUIRE(p.wire_height_at(tx) == Catch::Approx(30.0).margin(1e-9));
}

TEST_CASE("span indexing assigns tower positions to the right-hand span") {
  const auto p = env::uniform_profile(3, 70.0, 30.0, 0.02);
  REQUIRE(p.span_index_at(0.0) == 0);
  REQUIRE(p.span_index_at(69.9) == 0);
  REQUIRE(p.span_index_at(70.0) == 1);
  REQUIRE(p.span_index_at(140.0) == 2);
  REQUIRE(p.span_index_at(210.0) == 2);  // closing tower stays with the last span
  REQUIRE(p.span_local(75.0, 1) == Catch::Approx(5.0));
  REQUIRE_THROWS_AS(p.span_index_at(210.1), std::domain_error);
}
