#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "noether/aircraft.hpp"
#include "noether/extremal.hpp"
#include "support.hpp"

using namespace noether;
using namespace noether::testing;

namespace {

struct Setup {
  ControlProblem p;
  Hamiltonian h;
  AnalyticLaw law;
};

Setup aircraftSetup(double c1 = 1.0, double c2 = 1.0) {
  aircraft::AircraftConfig cfg;
  cfg.c1 = c1;
  cfg.c2 = c2;
  ControlProblem p = aircraft::buildAircraftProblem(cfg);
  Hamiltonian h = buildHamiltonianP(p);
  return {p, h, aircraft::analyticControlLaw(cfg)};
}

// x' = u, L = u^2 on [0, 1]; closed form u = psi / 2 with psi0 = -1.
ControlProblem lqProblem() {
  ControlProblem p;
  p.n = 1;
  p.r = 1;
  p.phi = {parse("u1")};
  p.L = {parse("u1^2")};
  p.omega = {Interval{}};
  p.alpha = std::vector<double>{0.0};
  p.beta = std::vector<double>{1.0};
  return p;
}

// Full thrust throughout: sigma stays well above zero on [0, 1].
const std::vector<double> kThrustX{0.0, 0.0, 1.0, 0.5, 4.0};
const std::vector<double> kThrustPsi{0.2, -0.1, 2.0, 1.0, -0.5};
const Multipliers kThrustM{0.0, {-0.1, -1.0}};

}  // namespace

TEST_SUITE("extremal") {

TEST_CASE("zero field leaves state and costate unchanged") {
  ControlProblem p;
  p.n = 2;
  p.r = 1;
  p.phi = {parse("0"), parse("0")};
  p.L = {parse("1")};
  p.omega = {Interval{-1.0, 1.0}};
  const Hamiltonian h = buildHamiltonianP(p);
  const std::vector<double> x{1.5, -2.0}, psi{0.25, 3.0};
  const auto traj = integrateExtremal(p, h, x, psi, Multipliers{0.0, {-1.0}}, GridSearch{}, 10);
  REQUIRE(traj.nodes() == 11);
  CHECK(traj.t.front() == p.a);
  CHECK(traj.t.back() == p.b);
  for (std::size_t k = 0; k < traj.nodes(); ++k) {
    CHECK(traj.x[k] == x);
    CHECK(traj.psi[k] == psi);
    CHECK(traj.u[k][0] == -1.0);  // H independent of u: low corner
  }
}

TEST_CASE("aircraft control law examples") {
  const auto s = aircraftSetup();
  const std::vector<double> x{0.0, 0.0, 1.0, 1.0, 5.0};
  auto u = maximizeH(s.h, 0.0, x, std::vector<double>{0.0, 0.0, 1.0, 0.0, 0.0}, Multipliers{0.0, {-1.0, -0.5}},
                     s.p.omega, s.law);
  CHECK(u[1] == 0.0);
  CHECK(u[0] == 0.0);  // sigma = -1 + 1/5 < 0

  u = maximizeH(s.h, 0.0, x, std::vector<double>{0.0, 0.0, 1.0, 1.0, 0.0}, Multipliers{0.0, {-0.1, -0.5}}, s.p.omega,
                s.law);
  CHECK(u[1] == doctest::Approx(std::numbers::pi / 4));
  CHECK(u[0] == 1.0);

  // Angle outside the interval: the better endpoint.
  u = maximizeH(s.h, 0.0, x, std::vector<double>{0.0, 0.0, 0.1, 1.0, 0.0}, Multipliers{0.0, {-1.0, -0.5}}, s.p.omega,
                s.law);
  CHECK(u[1] == 1.2);

  // psi3 = psi4 = 0: grid fallback.
  u = maximizeH(s.h, 0.0, x, std::vector<double>{0.0, 0.0, 0.0, 0.0, 1.0}, Multipliers{0.0, {-1.0, -0.5}},
                s.p.omega, s.law);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == -1.2);
}

TEST_CASE("analytic aircraft law never loses to grid search") {
  const auto s = aircraftSetup(1.4, 0.8);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> w(-3.0, 3.0), mass(0.5, 10.0), neg(-2.0, 0.0);
  MaximizeOptions audit;
  audit.audit = true;
  for (int k = 0; k < 200; ++k) {
    std::vector<double> x{w(rng), w(rng), w(rng), w(rng), mass(rng)};
    std::vector<double> psi{w(rng), w(rng), w(rng), w(rng), w(rng)};
    const Multipliers m{0.0, {neg(rng), neg(rng)}};
    CHECK_NOTHROW(maximizeH(s.h, w(rng), x, psi, m, s.p.omega, s.law, audit));
  }
}

TEST_CASE("audit catches a wrong analytic law") {
  const auto s = aircraftSetup();
  AnalyticLaw wrong;
  wrong.control = [](const HamiltonianState&) { return std::optional<std::vector<double>>({0.0, 0.0}); };
  MaximizeOptions audit;
  audit.audit = true;
  const std::vector<double> x{0.0, 0.0, 1.0, 1.0, 2.0}, psi{0.0, 0.0, 1.0, 1.0, 0.0};
  CHECK_THROWS_AS(maximizeH(s.h, 0.0, x, psi, Multipliers{0.0, {-0.1, -1.0}}, s.p.omega, wrong, audit),
                  ControlLawError);

  AnalyticLaw outside;
  outside.control = [](const HamiltonianState&) { return std::optional<std::vector<double>>({2.0, 0.0}); };
  CHECK_THROWS_AS(maximizeH(s.h, 0.0, x, psi, Multipliers{0.0, {-0.1, -1.0}}, s.p.omega, outside), ControlLawError);
}

TEST_CASE("grid search needs a bounded control set") {
  ControlProblem p = lqProblem();
  const Hamiltonian h = buildHamiltonianP1(p);
  const std::vector<double> x{0.0}, psi{1.0};
  CHECK_THROWS_AS(maximizeH(h, 0.0, x, psi, Multipliers{-1.0, {}}, p.omega, GridSearch{}), ModelError);
  p.omega = {Interval{-3.0, 3.0}};
  const auto u = maximizeH(h, 0.0, x, psi, Multipliers{-1.0, {}}, p.omega, GridSearch{});
  CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("range and altitude costates stay constant on aircraft extremals") {
  const auto s = aircraftSetup();
  const std::vector<double> x{0.0, 0.0, 1.0, 1.0, 5.0}, psi{0.3, -0.2, 1.0, 0.5, 0.1};
  const Multipliers m{0.0, {-1.0, -0.5}};
  const auto traj = integrateExtremal(s.p, s.h, x, psi, m, s.law, 1000);
  for (std::size_t k = 0; k < traj.nodes(); ++k) {
    CHECK(std::abs(traj.psi[k][0] - 0.3) <= 1e-13);
    CHECK(std::abs(traj.psi[k][1] + 0.2) <= 1e-13);
  }
  const auto p1 = checkLaw(traj, lawP(s.p, generator(aircraft::x1Translation())), 1e-13);
  CHECK(p1.pass);
  CHECK(p1.maxDrift == 0.0);

  // The horizontal speed changes only under thrust; the vertical one always.
  ConservationLaw probe{parse("x4"), s.h.signature, "probe"};
  CHECK_FALSE(checkLaw(traj, probe, defaultLawTolerance(1e-3, false)).pass);
}

TEST_CASE("RK4 self-convergence on a thrusting arc") {
  const auto s = aircraftSetup();
  const auto ref = integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, 2000);
  auto error = [&](std::size_t steps) {
    const auto traj = integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, steps);
    double worst = 0.0;
    for (std::size_t i = 0; i < 5; ++i) worst = std::max(worst, std::abs(traj.x.back()[i] - ref.x.back()[i]));
    return worst;
  };
  const double coarse = error(50), fine = error(100);
  for (const auto& u : ref.u) CHECK(u[0] == 1.0);
  CHECK(coarse / fine > 12.0);
}

TEST_CASE("Hamiltonian is conserved with fourth-order drift on a switch-free arc") {
  const auto s = aircraftSetup();
  OneParamGroup tt = identityGroup(5, 2);
  tt.T = parse("t + s");
  const auto law = lawP(s.p, generator(tt));
  const auto d1 = checkLaw(integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, 25), law, 1.0);
  const auto d2 = checkLaw(integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, 50), law, 1.0);
  CHECK(d1.normalizedDrift / d2.normalizedDrift >= 8.0);
  const auto fine = checkLaw(integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, 1000), law,
                             defaultLawTolerance(1e-3, false));
  CHECK(fine.pass);
}

TEST_CASE("dH/dt identity on a time-varying toy problem") {
  // L = u^2 + t x: psi' = t, dH/dt = psi0 x.
  ControlProblem p = lqProblem();
  p.L = {parse("u1^2 + t*x1")};
  const Hamiltonian h = buildHamiltonianP1(p);
  const auto law = analyticLawFromExprs({parse("-psi1/(2*psi0)")}, h.signature);
  const std::vector<double> x{1.0}, psi{0.5};
  const auto traj = integrateExtremal(p, h, x, psi, Multipliers{-1.0, {}}, law, 1000);
  const auto report = checkHamiltonianIdentity(traj, h, 1e-4);
  CHECK(report.pass);
  CHECK(report.nodesChecked == 999);
  // psi(t) = 0.5 + t^2 / 2
  CHECK(traj.psi.back()[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dH/dt identity skips nodes next to a switch") {
  const auto s = aircraftSetup();
  // sigma = -0.2 + psi3 / x5 - psi5 starts positive and decreases: one switch.
  const std::vector<double> x{0.0, 0.0, 1.0, 0.0, 2.0}, psi{0.6, 0.0, 1.0, 0.0, 0.0};
  const Multipliers m{0.0, {-0.2, -1.0}};
  const auto traj = integrateExtremal(s.p, s.h, x, psi, m, s.law, 1000);
  const auto switches = detectSwitches(s.p, s.h, traj, s.law);
  REQUIRE(switches.times.size() == 1);
  CHECK_FALSE(switches.singular);
  const auto report = checkHamiltonianIdentity(traj, s.h, 1e-4);
  CHECK(report.nodesExcluded == 2);
  CHECK(report.pass);

  // The switch is bracketed by a change of the throttle.
  const double ts = switches.times[0];
  const auto k = static_cast<std::size_t>(ts / 1e-3);
  CHECK(traj.u[k][0] != traj.u[k + 1][0]);
}

TEST_CASE("switch detection on constant-sign and singular switching functions") {
  const auto s = aircraftSetup();
  const auto traj = integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, 200);
  const auto none = detectSwitches(s.p, s.h, traj, s.law);
  CHECK(none.times.empty());
  CHECK_FALSE(none.singular);

  AnalyticLaw flat = s.law;
  flat.switching = [](const HamiltonianState&) { return 0.0; };
  CHECK(detectSwitches(s.p, s.h, traj, flat).singular);

  AnalyticLaw noSwitch = s.law;
  noSwitch.switching = nullptr;
  CHECK_THROWS_AS(detectSwitches(s.p, s.h, traj, noSwitch), ModelError);
}

TEST_CASE("mass running out raises an integration error with the partial trajectory") {
  const auto s = aircraftSetup();
  ControlProblem p = s.p;
  p.b = 3.0;
  AnalyticLaw fullThrust;
  fullThrust.control = [](const HamiltonianState&) { return std::optional<std::vector<double>>(std::vector<double>{1.0, 0.0}); };
  const std::vector<double> x{0.0, 0.0, 1.0, 1.0, 1.0};
  try {
    integrateExtremal(p, s.h, x, kThrustPsi, kThrustM, fullThrust, 300);
    FAIL("expected an integration error");
  } catch (const IntegrationError& err) {
    CHECK(err.partial().nodes() > 50);
    CHECK(err.partial().nodes() < 301);
    CHECK(err.partial().x.back()[4] > 0.0);
  }
}

TEST_CASE("shooting recovers the closed-form LQ extremal") {
  const ControlProblem p = lqProblem();
  const Hamiltonian h = buildHamiltonianP1(p);
  const auto law = analyticLawFromExprs({parse("-psi1/(2*psi0)")}, h.signature);
  const auto result = shoot(p, h, Multipliers{-1.0, {}}, law, 100);
  CHECK(result.psiA[0] == doctest::Approx(2.0).epsilon(1e-9));
  for (std::size_t k = 0; k < result.trajectory.nodes(); ++k) {
    CHECK(std::abs(result.trajectory.u[k][0] - 1.0) <= 1e-8);
    CHECK(std::abs(result.trajectory.x[k][0] - result.trajectory.t[k]) <= 1e-8);
  }
}

TEST_CASE("shooting edge cases") {
  ControlProblem still;
  still.n = 1;
  still.r = 1;
  still.phi = {parse("0")};
  still.L = {parse("u1^2")};
  still.omega = {Interval{-1.0, 1.0}};
  still.alpha = std::vector<double>{2.0};
  still.beta = std::vector<double>{2.0};
  const Hamiltonian hs = buildHamiltonianP1(still);
  CHECK(shoot(still, hs, Multipliers{-1.0, {}}, GridSearch{}, 10).iterations == 0);

  // Bounded throttle cannot reach the target.
  ControlProblem far = lqProblem();
  far.omega = {Interval{-1.0, 1.0}};
  far.beta = std::vector<double>{5.0};
  const Hamiltonian hf = buildHamiltonianP1(far);
  AnalyticLaw clamp;
  clamp.control = [](const HamiltonianState& s) {
    return std::optional<std::vector<double>>(std::vector<double>{std::clamp(s.psi[0] / 2.0, -1.0, 1.0)});
  };
  ShootOptions opts;
  opts.maxIterations = 10;
  try {
    shoot(far, hf, Multipliers{-1.0, {}}, clamp, 50, opts);
    FAIL("expected a shooting error");
  } catch (const ShootingError& err) {
    CHECK(err.residual() == doctest::Approx(4.0));
    CHECK(err.bestPsi().size() == 1);
  }
  CHECK_THROWS_AS(shoot(aircraftSetup().p, aircraftSetup().h, kThrustM, aircraftSetup().law, 10), ModelError);
}

TEST_CASE("drift tolerance") {
  CHECK(defaultLawTolerance(1e-3, false) == doctest::Approx(1e-6));
  CHECK(defaultLawTolerance(1e-3, true) == doctest::Approx(0.05));
  CHECK(defaultLawTolerance(0.1, true) == doctest::Approx(100.0));
}

TEST_CASE("trajectory CSV") {
  const auto s = aircraftSetup();
  const auto traj = integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, 4);
  std::ostringstream out;
  writeTrajectoryCsv(out, traj, "run");
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# run");
  std::getline(in, line);
  CHECK(line == "t,x1,x2,x3,x4,x5,u1,u2,psi1,psi2,psi3,psi4,psi5");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (rows == 2) CHECK(line.rfind("0.25,", 0) == 0);
  }
  CHECK(rows == 5);
}

TEST_CASE("law and trajectory must share the problem form") {
  const auto s = aircraftSetup();
  const auto traj = integrateExtremal(s.p, s.h, kThrustX, kThrustPsi, kThrustM, s.law, 4);
  const ControlProblem lq = lqProblem();
  const auto law = lawP1(lq, generator(identityGroup(1, 1)));
  CHECK_THROWS_AS(checkLaw(traj, law, 1e-6), ModelError);
}

}  // TEST_SUITE
