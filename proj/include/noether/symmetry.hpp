#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noether/execution.hpp"
#include "noether/model.hpp"

namespace noether {

/// h^s(t,x,u) = (T, X, U), with s in (-epsilon, epsilon) and h^0 = identity.
struct OneParamGroup {
  std::string name;
  Expr T;
  std::vector<Expr> X;  // n entries
  std::vector<Expr> U;  // r entries
  double epsilon = 1.0;
  /// Declared control rates; needed only when T or X depend on a control.
  std::optional<std::vector<Expr>> uDot;
};

OneParamGroup identityGroup(std::size_t n, std::size_t r, std::string name = "identity");

/// Infinitesimal generator (dT/ds, dX/ds, dU/ds) at s = 0.
struct Generator {
  Expr tau;
  std::vector<Expr> xi;
  std::vector<Expr> upsilon;
};

Generator generator(const OneParamGroup& grp);

/// Chain rule along trajectories: de/dt + sum de/dx_i phi_i + sum de/du_j uDot_j.
/// Throws ModelError naming the control when uDot is needed but missing.
Expr totalTimeDerivative(const Expr& e, const ControlProblem& p, const OneParamGroup& grp);

/// Per-variable sampling box plus deterministic sampling parameters.
struct SampleConfig {
  std::map<std::string, Interval> intervals;
  Interval fallback{-5.0, 5.0};  // for variables without an explicit interval
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  bool skipDomainErrors = false;

  /// Interval for a variable; t defaults to [a, b] of the problem.
  Interval box(const std::string& var, const ControlProblem& p) const;
};

/// Scrambled Halton sequence (Cranley-Patterson rotation from the seed).
class LowDiscrepancySampler {
public:
  LowDiscrepancySampler(std::size_t dimension, std::uint64_t seed);
  /// Coordinates of point `index` in [0, 1)^dimension.
  void point(std::size_t index, std::span<double> out) const;
  std::size_t dimension() const noexcept { return shifts_.size(); }

private:
  std::vector<double> shifts_;
};

struct ConditionResidual {
  std::string name;  // X1.., L1.., g1..
  double worst = 0.0;
  std::map<std::string, double> worstPoint;
  bool pass = true;
};

struct InvarianceReport {
  std::vector<ConditionResidual> conditions;
  std::size_t samples = 0;
  std::size_t skipped = 0;       // samples dropped for domain errors (only if permitted)
  std::size_t domainFailures = 0;  // in-box domain errors counted against the check
  std::string firstDomainError;
  double tolerance = 0.0;
  std::vector<std::string> notes;

  bool passed() const noexcept;
  const ConditionResidual* find(const std::string& name) const;
};

/// Checks the identity-at-zero invariant at 100 points of the sampling box
/// (relative tolerance 1e-12), arities, and that the s-derivatives up to
/// second order are finite on the box. Throws ModelError on violation.
void validateGroup(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg);

/// Finite-s invariance of dynamics and every cost (vector problem form).
InvarianceReport checkInvarianceP(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg,
                                  Execution exec = Execution::Parallel);
/// Finite-s invariance of dynamics, the scalar cost and every constraint.
InvarianceReport checkInvarianceP1(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg,
                                   Execution exec = Execution::Parallel);
/// Linearized (s = 0) identities built from the generator alone.
InvarianceReport checkInfinitesimal(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg,
                                    Execution exec = Execution::Parallel);

}  // namespace noether
