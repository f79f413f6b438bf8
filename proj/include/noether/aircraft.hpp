#pragma once
//
// Built-in pilotless-aircraft example: range x1, altitude x2, velocity
// components x3/x4, mass x5; fuel rate u1 and thrust angle u2. Costs are
// fuel (int u1) and flight time (int 1).
//
// The numeric constants below are tool defaults, not measured values.
//

#include <vector>

#include "noether/extremal.hpp"
#include "noether/symmetry.hpp"

namespace noether::aircraft {

struct AircraftConfig {
  double c1 = 1.0;
  double c2 = 1.0;
  double u1max = 1.0;
  double u2lo = -1.2;
  double u2hi = 1.2;
  double horizon = 1.0;

  /// c1, c2, u1max > 0; u2 interval strictly inside (-pi/2, pi/2).
  void validate() const;
};

ControlProblem buildAircraftProblem(const AircraftConfig& cfg = {});

/// x1-translation, x2-translation and the scaling group, in that order.
std::vector<OneParamGroup> builtinGroups();

OneParamGroup x1Translation();
OneParamGroup x2Translation();
OneParamGroup scalingGroup();

/// Where the fuel-cost multiplier lives: lambda1 in the vector form, psi0
/// after scalarizing with the fuel cost as objective.
enum class FuelWeight { Lambda1, Psi0 };

/// Thrust angle from the direction of (psi3, psi4) restricted to the u2
/// interval; bang-bang fuel rate on
///   sigma = w + c1 (psi3 cos u2 + psi4 sin u2) / x5 - psi5,
/// full thrust iff sigma > 0. Indeterminate (grid fallback) when psi3 = psi4 = 0.
AnalyticLaw analyticControlLaw(const AircraftConfig& cfg = {}, FuelWeight weight = FuelWeight::Lambda1);

/// Sampling box used for the invariance checks: x5 in [0.1, 10],
/// u2 in [-1.2, 1.2], s in [-0.5, 0.5], everything else in [-5, 5].
SampleConfig defaultSampleBox(std::size_t samples = 1000, std::uint64_t seed = 1);

}  // namespace noether::aircraft
