#include "noether/aircraft.hpp"

#include <cmath>
#include <numbers>

namespace noether::aircraft {

void AircraftConfig::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ModelError("aircraft constants c1 and c2 must be positive");
  if (!(u1max > 0.0)) throw ModelError("maximum fuel rate must be positive");
  const double half = std::numbers::pi / 2.0;
  if (!(u2lo > -half && u2hi < half && u2lo < u2hi))
    throw ModelError("thrust-angle interval must lie strictly inside (-pi/2, pi/2)");
  if (!(horizon > 0.0)) throw ModelError("horizon must be positive");
}

ControlProblem buildAircraftProblem(const AircraftConfig& cfg) {
  cfg.validate();
  ControlProblem p;
  p.n = 5;
  p.r = 2;
  p.a = 0.0;
  p.b = cfg.horizon;
  p.constants = {{"c1", cfg.c1}, {"c2", cfg.c2}};
  p.phi = {parse("x3"), parse("x4"), parse("c1*(u1/x5)*cos(u2)"), parse("c1*(u1/x5)*sin(u2) - c2"), parse("-u1")};
  p.L = {parse("u1"), parse("1")};
  p.omega = {{0.0, cfg.u1max}, {cfg.u2lo, cfg.u2hi}};
  p.stateDomain.assign(5, Interval{});
  p.stateDomain[4].lo = 0.0;
  p.validate();
  return p;
}

OneParamGroup x1Translation() {
  OneParamGroup g = identityGroup(5, 2, "x1-translation");
  g.X[0] = parse("x1 + s");
  return g;
}

OneParamGroup x2Translation() {
  OneParamGroup g = identityGroup(5, 2, "x2-translation");
  g.X[1] = parse("x2 + s");
  return g;
}

OneParamGroup scalingGroup() {
  OneParamGroup g = identityGroup(5, 2, "scaling");
  g.X = {parse("exp(s)*x1"), parse("exp(2*s)*x2"), parse("exp(s)*x3"), parse("exp(2*s)*x4"), parse("x5")};
  g.U = {parse("u1"), parse("atan(exp(s)*tan(u2))")};
  return g;
}

std::vector<OneParamGroup> builtinGroups() { return {x1Translation(), x2Translation(), scalingGroup()}; }

AnalyticLaw analyticControlLaw(const AircraftConfig& cfg, FuelWeight weight) {
  cfg.validate();
  auto angle = [cfg](double p3, double p4) {
    const double theta = std::atan2(p4, p3);
    if (theta >= cfg.u2lo && theta <= cfg.u2hi) return theta;
    const double atLo = p3 * std::cos(cfg.u2lo) + p4 * std::sin(cfg.u2lo);
    const double atHi = p3 * std::cos(cfg.u2hi) + p4 * std::sin(cfg.u2hi);
    return atHi > atLo ? cfg.u2hi : cfg.u2lo;
  };
  auto fuelWeight = [weight](const HamiltonianState& s) { return weight == FuelWeight::Psi0 ? s.psi0 : s.lambda[0]; };
  auto sigma = [cfg, angle, fuelWeight](const HamiltonianState& s) {
    const double u2 = angle(s.psi[2], s.psi[3]);
    return fuelWeight(s) + cfg.c1 * (s.psi[2] * std::cos(u2) + s.psi[3] * std::sin(u2)) / s.x[4] - s.psi[4];
  };

  AnalyticLaw law;
  law.description = "aircraft: thrust angle along (psi3, psi4), bang-bang fuel rate";
  law.switchedControl = 0;
  law.switching = sigma;
  law.control = [cfg, angle, sigma](const HamiltonianState& s) -> std::optional<std::vector<double>> {
    if (s.psi[2] == 0.0 && s.psi[3] == 0.0) return std::nullopt;
    const double u2 = angle(s.psi[2], s.psi[3]);
    const double u1 = sigma(s) > 0.0 ? cfg.u1max : 0.0;
    return std::vector<double>{u1, u2};
  };
  return law;
}

SampleConfig defaultSampleBox(std::size_t samples, std::uint64_t seed) {
  SampleConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.fallback = {-5.0, 5.0};
  cfg.intervals["t"] = {-5.0, 5.0};
  cfg.intervals["x5"] = {0.1, 10.0};
  cfg.intervals["u2"] = {-1.2, 1.2};
  cfg.intervals["s"] = {-0.5, 0.5};
  return cfg;
}

}  // namespace noether::aircraft
