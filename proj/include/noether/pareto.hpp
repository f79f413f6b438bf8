#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "noether/execution.hpp"
#include "noether/extremal.hpp"

namespace noether {

struct OutcomePoint {
  std::vector<double> lambda;
  std::vector<double> costs;  // I_1..I_N by composite Simpson on the node grid
  std::optional<Trajectory> trajectory;
  std::string failure;  // empty on success

  bool ok() const noexcept { return failure.empty(); }
};

/// Scalar problem with cost L_i and inequality constraints
/// int L_j <= reference.costs[j] for every j != i (0-based index).
ControlProblem scalarize(const ControlProblem& p, std::size_t index, const OutcomePoint& reference);

/// Vector-form multipliers equivalent to the scalarized ones: psi0 goes to
/// slot `index`, the constraint multipliers fill the remaining slots in order.
std::vector<double> vectorMultipliers(std::size_t index, const Multipliers& scalarized);

/// Composite Simpson integrals of every cost along the trajectory. The node
/// count must be odd (even number of steps).
std::vector<double> costIntegrals(const ControlProblem& p, const Trajectory& traj);

/// Points lambda <= 0 with sum |lambda_j| = 1 on a regular simplex grid with
/// `pointsPerEdge` points along each edge, in lexicographic order.
std::vector<std::vector<double>> simplexGrid(std::size_t costs, std::size_t pointsPerEdge);

struct FixedCostate {
  std::vector<double> psiA;
};
struct ShootCostate {
  ShootOptions options;
};
using CostatePolicy = std::variant<FixedCostate, ShootCostate>;

struct SweepOptions {
  std::size_t steps = 1000;  // rounded up to even
  bool keepTrajectories = false;
};

/// One extremal per multiplier vector; failures are recorded per point.
std::vector<OutcomePoint> sweep(const ControlProblem& p, const ControlLaw& law, std::span<const double> xA,
                                const CostatePolicy& costate, const std::vector<std::vector<double>>& lambdaGrid,
                                const SweepOptions& options = {}, Execution exec = Execution::Parallel);

/// true where a successful point is not strictly dominated by any other
/// successful point (costs equal within `tieTolerance` count as equal).
std::vector<bool> nonDominatedMask(const std::vector<OutcomePoint>& points, double tieTolerance = 1e-9);

/// The non-dominated successful points in input order; duplicates are kept.
std::vector<OutcomePoint> filterDominated(const std::vector<OutcomePoint>& points, double tieTolerance = 1e-9);

/// Columns lambda1..lambdaN, I1..IN, kept, failure. `dedupe` marks only the
/// first of several kept points with equal costs as kept.
void writeSweepCsv(std::ostream& out, const std::vector<OutcomePoint>& points, std::size_t costs,
                   const std::string& comment = {}, bool dedupe = false);

}  // namespace noether
