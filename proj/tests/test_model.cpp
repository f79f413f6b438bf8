#include <doctest.h>

#include <random>

#include "noether/aircraft.hpp"
#include "noether/model.hpp"
#include "support.hpp"

using namespace noether;

namespace {

ControlProblem lqProblem() {
  ControlProblem p;
  p.n = 1;
  p.r = 1;
  p.phi = {parse("u1")};
  p.L = {parse("u1^2")};
  p.omega = {Interval{}};
  return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("the aircraft problem is well formed") {
  const ControlProblem p = aircraft::buildAircraftProblem();
  CHECK_NOTHROW(p.validate());
  CHECK(p.n == 5);
  CHECK(p.r == 2);
  CHECK(p.costCount() == 2);
  CHECK(p.constraints.empty());
}

TEST_CASE("validation rejects malformed problems") {
  ControlProblem p = lqProblem();
  p.phi.push_back(parse("x1"));
  CHECK_THROWS_AS(p.validate(), ModelError);

  p = lqProblem();
  p.L = {parse("u1 + x7")};
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("x7"), ModelError);

  p = lqProblem();
  p.b = p.a;
  CHECK_THROWS_AS(p.validate(), ModelError);

  p = lqProblem();
  p.constraints = {{parse("x1"), 1.0, ConstraintKind::Inequality}, {parse("u1"), 0.0, ConstraintKind::Equality}};
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("precede"), ModelError);

  p = lqProblem();
  p.omega = {Interval{1.0, 0.0}};
  CHECK_THROWS_AS(p.validate(), ModelError);

  p = lqProblem();
  p.constants["s"] = 1.0;
  CHECK_THROWS_AS(p.validate(), ModelError);
}

TEST_CASE("aircraft dynamics surface the division by mass") {
  const ControlProblem p = aircraft::buildAircraftProblem();
  CHECK_THROWS_AS(eval(p.phi[2], {{"c1", 1.0}, {"u1", 1.0}, {"x5", 0.0}, {"u2", 0.0}}), DomainError);
}

TEST_CASE("vector Hamiltonian of the aircraft problem") {
  const ControlProblem p = aircraft::buildAircraftProblem();
  const Hamiltonian h = buildHamiltonianP(p);
  CHECK(h.signature.form == ProblemForm::P);
  CHECK(h.signature.multiplierCount == 2);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    Env env = testing::randomEnv(rng, {"x1", "x2", "x3", "x4", "u1", "u2", "psi1", "psi2", "psi3", "psi4", "psi5",
                                       "lambda1", "lambda2"});
    env.set("x5", 1.0 + std::abs(env.at("x1")));
    env.set("c1", 1.3);
    env.set("c2", 0.7);
    const double u1 = env.at("u1"), u2 = env.at("u2"), x5 = env.at("x5");
    const double expected = env.at("lambda1") * u1 + env.at("lambda2") + env.at("psi1") * env.at("x3") +
                            env.at("psi2") * env.at("x4") + env.at("psi3") * 1.3 * u1 / x5 * std::cos(u2) +
                            env.at("psi4") * (1.3 * u1 / x5 * std::sin(u2) - 0.7) - env.at("psi5") * u1;
    CHECK(eval(h.expr, env) == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK_THROWS_AS(buildHamiltonianP1(p), ModelError);
}

TEST_CASE("scalar Hamiltonian with constraints and adjoint equation") {
  ControlProblem p = lqProblem();
  p.constraints = {{parse("x1^2"), 1.0, ConstraintKind::Equality}, {parse("u1"), 0.0, ConstraintKind::Inequality}};
  const Hamiltonian h = buildHamiltonianP1(p);
  CHECK(h.signature.multiplierCount == 2);
  CHECK(h.signature.equalityCount == 1);
  Env env{{"psi0", -1.0}, {"psi1", 0.5}, {"lambda1", 2.0}, {"lambda2", -0.5}, {"x1", 3.0}, {"u1", 0.25}};
  CHECK(eval(h.expr, env) == doctest::Approx(-0.0625 + 0.125 + 18.0 - 0.125));
  const auto rhs = adjointRHS(h);
  REQUIRE(rhs.size() == 1);
  CHECK(eval(rhs[0], env) == doctest::Approx(-12.0));
  CHECK_THROWS_AS(buildHamiltonianP(p), ModelError);
}

TEST_CASE("multiplier sign rules") {
  ControlProblem p = lqProblem();
  p.constraints = {{parse("x1"), 1.0, ConstraintKind::Equality}, {parse("u1"), 0.0, ConstraintKind::Inequality}};
  const Signature s1 = signatureOf(p, ProblemForm::P1);
  auto check = [](double psi0, std::vector<double> lambda, const Signature& sig) {
    Multipliers{psi0, std::move(lambda)}.validate(sig);
  };
  CHECK_NOTHROW(check(-1.0, {3.0, -1.0}, s1));
  CHECK_NOTHROW(check(0.0, {3.0, 0.0}, s1));  // abnormal case accepted
  CHECK_THROWS_AS(check(0.5, {0.0, 0.0}, s1), ModelError);
  CHECK_THROWS_AS(check(-1.0, {0.0, 0.5}, s1), ModelError);
  CHECK_THROWS_AS(check(-1.0, {0.0}, s1), ModelError);

  const Signature sp = signatureOf(aircraft::buildAircraftProblem(), ProblemForm::P);
  CHECK_NOTHROW(check(0.0, {-1.0, -0.5}, sp));
  CHECK_THROWS_AS(check(0.0, {-1.0, 0.5}, sp), ModelError);
}

TEST_CASE("problem layout slots") {
  const ControlProblem p = aircraft::buildAircraftProblem();
  const ProblemLayout layout(signatureOf(p, ProblemForm::P));
  CHECK(layout.vars().index("t") == layout.t());
  CHECK(layout.vars().index("x5") == layout.x(4));
  CHECK(layout.vars().index("u2") == layout.u(1));
  CHECK(layout.vars().index("s") == layout.s());
  CHECK(layout.vars().index("psi3") == layout.psi(2));
  CHECK(layout.vars().index("lambda2") == layout.lambda(1));
  CHECK_THROWS_AS(layout.psi0(), UnboundVariable);
  const auto point = layout.makePoint();
  CHECK(point[layout.vars().index("c1")] == 1.0);

  ControlProblem q = lqProblem();
  const ProblemLayout l1(signatureOf(q, ProblemForm::P1));
  CHECK(l1.vars().index("psi0") == l1.psi0());
}

}  // TEST_SUITE
