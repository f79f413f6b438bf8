#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "noether/aircraft.hpp"
#include "noether/io.hpp"
#include "support.hpp"

using namespace noether;
using namespace noether::io;

namespace {

std::filesystem::path scratchFile(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("noether_io_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("problem round trip") {
  const auto p = aircraft::buildAircraftProblem();
  const auto back = problemFromJson(toJson(p));
  CHECK(back.n == 5);
  CHECK(back.r == 2);
  CHECK(back.constants == p.constants);
  REQUIRE(back.phi.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(print(back.phi[i]) == print(p.phi[i]));
  CHECK(back.omega[1].lo == -1.2);
  CHECK(back.omega[0].hi == 1.0);
  REQUIRE(back.stateDomain.size() == 5);
  CHECK(back.stateDomain[4].lo == 0.0);
  CHECK(toJson(back) == toJson(p));
}

TEST_CASE("group and sample config round trips") {
  const auto g = aircraft::scalingGroup();
  const auto back = groupFromJson(toJson(g));
  CHECK(back.name == "scaling");
  CHECK(print(back.U[1]) == "atan(exp(s)*tan(u2))");
  CHECK(toJson(back) == toJson(g));

  const auto cfg = aircraft::defaultSampleBox(250, 9);
  const auto cb = sampleConfigFromJson(toJson(cfg));
  CHECK(cb.samples == 250);
  CHECK(cb.seed == 9);
  CHECK(cb.intervals.at("x5").lo == 0.1);
  CHECK(toJson(cb) == toJson(cfg));
}

TEST_CASE("input errors") {
  try {
    readJsonFile(scratchFile("bad.json", "{\"n\": 1,\n \"r\": }"));
    FAIL("expected malformed JSON");
  } catch (const InputError& err) {
    CHECK(std::string(err.what()).find("at byte 16") != std::string::npos);
  }
  CHECK_THROWS_AS(readJsonFile("/nonexistent/file.json"), InputError);

  json j = toJson(aircraft::buildAircraftProblem());
  j.erase("phi");
  CHECK_THROWS_WITH_AS(problemFromJson(j), doctest::Contains("phi"), InputError);

  j = toJson(aircraft::buildAircraftProblem());
  j["phi"][2] = "c1*(u1/x5";
  CHECK_THROWS_WITH_AS(problemFromJson(j), doctest::Contains("phi[2]"), InputError);

  j = toJson(aircraft::buildAircraftProblem());
  j["L"][0] = "u3";
  CHECK_THROWS_WITH_AS(problemFromJson(j), doctest::Contains("u3"), InputError);

  j = toJson(aircraft::buildAircraftProblem());
  j["N"] = 3;
  CHECK_THROWS_AS(problemFromJson(j), InputError);

  json g = toJson(aircraft::scalingGroup());
  g["epsilon"] = 0.0;
  CHECK_THROWS_AS(groupFromJson(g), InputError);

  json s = toJson(aircraft::defaultSampleBox());
  s["intervals"]["x5"] = {3.0, 1.0};
  CHECK_THROWS_AS(sampleConfigFromJson(s), InputError);
}

TEST_CASE("report serialization") {
  const auto p = aircraft::buildAircraftProblem();
  const auto report = checkInvarianceP(p, aircraft::scalingGroup(), aircraft::defaultSampleBox(100, 1));
  const json j = toJson(report);
  CHECK(j["pass"] == false);
  CHECK(j["samples"] == 100);
  CHECK(j["conditions"].size() == 7);
  CHECK(j["conditions"][2]["name"] == "X3");
  CHECK(j["conditions"][2]["worstPoint"].contains("u2"));

  const auto law = lawP(p, generator(aircraft::scalingGroup()), "scaling");
  const json lj = toJson(law);
  CHECK(lj["expr"] == "psi1*x1 + 2*psi2*x2 + psi3*x3 + 2*psi4*x4");
  CHECK(lj["form"] == "P");
}

}  // TEST_SUITE
