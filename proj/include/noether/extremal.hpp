#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "noether/model.hpp"
#include "noether/noether.hpp"

namespace noether {

class ControlLawError : public Error {
public:
  using Error::Error;
};

/// What a control law sees when choosing u.
struct HamiltonianState {
  double t = 0.0;
  std::span<const double> x;
  std::span<const double> psi;
  double psi0 = 0.0;
  std::span<const double> lambda;
};

/// Derivative-free maximization over a bounded box: a coarse tensor grid,
/// then golden-section refinement per coordinate around the best node.
/// Ties go to the lexicographically smallest control.
struct GridSearch {
  std::size_t resolution = 64;
  std::size_t refinements = 20;
};

/// Closed-form arg-max. `control` may return nullopt where the maximizer is
/// indeterminate; grid search takes over there. `switching`, when set, is the
/// coefficient of the bang-bang control `switchedControl` in H.
struct AnalyticLaw {
  std::function<std::optional<std::vector<double>>(const HamiltonianState&)> control;
  std::function<double(const HamiltonianState&)> switching;
  std::size_t switchedControl = 0;
  GridSearch fallback;
  std::string description;
};

using ControlLaw = std::variant<GridSearch, AnalyticLaw>;

/// Analytic law from r expressions in t, x, psi, [psi0], lambda and constants.
AnalyticLaw analyticLawFromExprs(const std::vector<Expr>& controls, const Signature& sig,
                                 std::optional<Expr> switching = std::nullopt, std::size_t switchedControl = 0);

struct MaximizeOptions {
  /// Compare an analytic law against grid search (bounded sets only).
  bool audit = false;
  double auditTolerance = 1e-9;
  GridSearch auditGrid;
};

/// Control maximizing H over the box omega at the given state.
std::vector<double> maximizeH(const Hamiltonian& h, double t, std::span<const double> x, std::span<const double> psi,
                              const Multipliers& m, const std::vector<Interval>& omega, const ControlLaw& law,
                              const MaximizeOptions& options = {});

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> psi;
  Multipliers multipliers;
  Signature signature;

  std::size_t nodes() const noexcept { return t.size(); }
};

/// Domain error during integration; carries the nodes computed so far.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, Trajectory partial) : Error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

private:
  Trajectory partial_;
};

/// Classical RK4 on (x, psi) over [a, b] with `steps` uniform steps; u is
/// re-maximized at every stage. Throws IntegrationError mid-flow.
Trajectory integrateExtremal(const ControlProblem& p, const Hamiltonian& h, std::span<const double> xA,
                             std::span<const double> psiA, const Multipliers& m, const ControlLaw& law,
                             std::size_t steps);

struct ConservationReport {
  double initial = 0.0;
  double maxDrift = 0.0;
  double normalizedDrift = 0.0;  // maxDrift / (1 + |initial|)
  double worstTime = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

ConservationReport checkLaw(const Trajectory& traj, const ConservationLaw& law, double tolerance);

/// max(C h^4, 50 h [switch present]) with C = 1e6.
double defaultLawTolerance(double h, bool switchPresent);

struct HamiltonianIdentityReport {
  double worstResidual = 0.0;
  double worstTime = 0.0;
  std::size_t nodesChecked = 0;
  std::size_t nodesExcluded = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Central-difference dH/dt at interior nodes against the symbolic partial
/// dH/dt. Nodes next to a control jump larger than `jumpThreshold` are skipped.
HamiltonianIdentityReport checkHamiltonianIdentity(const Trajectory& traj, const Hamiltonian& h, double tolerance,
                                                   double jumpThreshold = 1e-2);

struct SwitchReport {
  std::vector<double> times;
  bool singular = false;
};

/// Sign changes of the law's switching function between nodes, refined by
/// bisection (re-integrating a partial RK4 step) to 1e-10 in t.
SwitchReport detectSwitches(const ControlProblem& p, const Hamiltonian& h, const Trajectory& traj,
                            const AnalyticLaw& law);

struct ShootOptions {
  std::size_t maxIterations = 50;
  double tolerance = 1e-10;
  double fdStep = 1e-7;
  std::optional<std::vector<double>> initialGuess;
};

struct ShootResult {
  std::vector<double> psiA;
  Trajectory trajectory;
  std::size_t iterations = 0;
  double residual = 0.0;
};

class ShootingError : public Error {
public:
  ShootingError(const std::string& what, std::vector<double> bestPsi, double residual, std::size_t iterations)
      : Error(what), bestPsi_(std::move(bestPsi)), residual_(residual), iterations_(iterations) {}
  const std::vector<double>& bestPsi() const noexcept { return bestPsi_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

private:
  std::vector<double> bestPsi_;
  double residual_;
  std::size_t iterations_;
};

/// Damped Newton on psi(a) with finite-difference sensitivities so that the
/// extremal from alpha reaches beta at b.
ShootResult shoot(const ControlProblem& p, const Hamiltonian& h, const Multipliers& m, const ControlLaw& law,
                  std::size_t steps, const ShootOptions& options = {});

/// Header t, x1..xn, u1..ur, psi1..psin; 17 significant digits. A non-empty
/// comment is written first as a '#' line.
void writeTrajectoryCsv(std::ostream& out, const Trajectory& traj, const std::string& comment = {});

}  // namespace noether
