#include <doctest.h>

#include <random>

#include "noether/aircraft.hpp"
#include "noether/noether.hpp"
#include "support.hpp"

using namespace noether;
using namespace noether::aircraft;

TEST_SUITE("aircraft") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(AircraftConfig{}.validate());
  AircraftConfig c;
  c.c1 = 0.0;
  CHECK_THROWS_AS(c.validate(), ModelError);
  c = {};
  c.u1max = -1.0;
  CHECK_THROWS_AS(c.validate(), ModelError);
  c = {};
  c.u2hi = 1.6;
  CHECK_THROWS_AS(buildAircraftProblem(c), ModelError);
  c = {};
  c.u2lo = 0.5;
  c.u2hi = 0.4;
  CHECK_THROWS_AS(c.validate(), ModelError);
}

TEST_CASE("builtin groups") {
  const auto groups = builtinGroups();
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].name == "x1-translation");
  CHECK(groups[1].name == "x2-translation");
  CHECK(groups[2].name == "scaling");
  const auto p = buildAircraftProblem();
  for (const auto& g : groups) CHECK_NOTHROW(validateGroup(p, g, defaultSampleBox(100, 1)));
  CHECK(print(lawP(p, generator(groups[0])).expr) == "psi1");
  CHECK(print(lawP(p, generator(groups[1])).expr) == "psi2");
}

TEST_CASE("translations stay symmetries for random constants") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> c(0.5, 5.0);
  for (int draw = 0; draw < 10; ++draw) {
    AircraftConfig cfg;
    cfg.c1 = c(rng);
    cfg.c2 = c(rng);
    const auto p = buildAircraftProblem(cfg);
    SampleConfig box = defaultSampleBox(1000, static_cast<std::uint64_t>(draw) + 1);
    box.tolerance = 1e-10;
    CHECK(checkInvarianceP(p, x1Translation(), box).passed());
    CHECK(checkInvarianceP(p, x2Translation(), box).passed());
  }
}

TEST_CASE("fuel weight selects the multiplier slot") {
  const auto law = analyticControlLaw({}, FuelWeight::Psi0);
  const std::vector<double> x{0.0, 0.0, 1.0, 0.0, 2.0}, psi{0.0, 0.0, 1.0, 0.0, 0.0};
  HamiltonianState s;
  s.x = x;
  s.psi = psi;
  s.psi0 = -0.4;  // sigma = -0.4 + 0.5 > 0
  CHECK(law.switching(s) == doctest::Approx(0.1));
  CHECK((*law.control(s))[0] == 1.0);
  s.psi0 = -0.6;
  CHECK((*law.control(s))[0] == 0.0);
}

TEST_CASE("default sampling box") {
  const auto box = defaultSampleBox();
  const auto p = buildAircraftProblem();
  CHECK(box.box("x5", p).lo == 0.1);
  CHECK(box.box("x5", p).hi == 10.0);
  CHECK(box.box("u2", p).hi == 1.2);
  CHECK(box.box("s", p).lo == -0.5);
  CHECK(box.box("x3", p).lo == -5.0);
  CHECK(box.samples == 1000);
}

}  // TEST_SUITE
