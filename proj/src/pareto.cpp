#include "noether/pareto.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>


namespace noether {

namespace {

bool dominates(const std::vector<double>& q, const std::vector<double>& p, double tol) {
  bool strictlyBetter = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] > p[i] + tol) return false;
    if (q[i] < p[i] - tol) strictlyBetter = true;
  }
  return strictlyBetter;
}

void enumerateSimplex(std::size_t costs, std::size_t remaining, std::size_t divisions, std::vector<std::size_t>& parts,
                      std::vector<std::vector<double>>& out) {
  if (parts.size() + 1 == costs) {
    parts.push_back(remaining);
    std::vector<double> lambda;
    for (auto k : parts) lambda.push_back(k == 0 ? 0.0 : -static_cast<double>(k) / static_cast<double>(divisions));
    out.push_back(std::move(lambda));
    parts.pop_back();
    return;
  }
  for (std::size_t k = remaining + 1; k-- > 0;) {
    parts.push_back(k);
    enumerateSimplex(costs, remaining - k, divisions, parts, out);
    parts.pop_back();
  }
}

OutcomePoint runPoint(const ControlProblem& p, const Hamiltonian& h, const ControlLaw& law,
                      std::span<const double> xA, const CostatePolicy& costate, const std::vector<double>& lambda,
                      const SweepOptions& options, std::size_t steps) {
  OutcomePoint out;
  out.lambda = lambda;
  Multipliers m;
  m.lambda = lambda;
  try {
    Trajectory traj;
    if (const auto* fixed = std::get_if<FixedCostate>(&costate)) {
      traj = integrateExtremal(p, h, xA, fixed->psiA, m, law, steps);
    } else {
      traj = shoot(p, h, m, law, steps, std::get<ShootCostate>(costate).options).trajectory;
    }
    out.costs = costIntegrals(p, traj);
    if (options.keepTrajectories) out.trajectory = std::move(traj);
  } catch (const Error& err) {
    out.failure = err.what();
    out.costs.assign(p.costCount(), std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace

ControlProblem scalarize(const ControlProblem& p, std::size_t index, const OutcomePoint& reference) {
  if (!p.constraints.empty()) throw ModelError("scalarization expects a vector-cost problem without constraints");
  if (p.costCount() < 2) throw ModelError("scalarization needs at least two costs");
  if (index >= p.costCount())
    throw ModelError("cost index " + std::to_string(index + 1) + " out of range 1.." + std::to_string(p.costCount()));
  if (reference.costs.size() != p.costCount()) throw ModelError("reference outcome has the wrong number of costs");
  ControlProblem out = p;
  out.L = {p.L[index]};
  for (std::size_t j = 0; j < p.costCount(); ++j) {
    if (j == index) continue;
    out.constraints.push_back({p.L[j], reference.costs[j], ConstraintKind::Inequality});
  }
  return out;
}

std::vector<double> vectorMultipliers(std::size_t index, const Multipliers& scalarized) {
  std::vector<double> out;
  out.reserve(scalarized.lambda.size() + 1);
  for (std::size_t j = 0, k = 0; j <= scalarized.lambda.size(); ++j)
    out.push_back(j == index ? scalarized.psi0 : scalarized.lambda[k++]);
  return out;
}

std::vector<double> costIntegrals(const ControlProblem& p, const Trajectory& traj) {
  const std::size_t nodes = traj.nodes();
  if (nodes < 3 || nodes % 2 == 0) throw ModelError("composite Simpson needs an even number of steps");
  const ProblemLayout layout(traj.signature);
  std::vector<double> point = layout.makePoint();
  std::vector<double> out;
  for (const auto& integrand : p.L) {
    const CompiledExpr f = layout.compile(integrand);
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
      point[layout.t()] = traj.t[k];
      for (std::size_t i = 0; i < p.n; ++i) point[layout.x(i)] = traj.x[k][i];
      for (std::size_t j = 0; j < p.r; ++j) point[layout.u(j)] = traj.u[k][j];
      const double w = (k == 0 || k + 1 == nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      sum += w * f(point);
    }
    const double h = (traj.t.back() - traj.t.front()) / static_cast<double>(nodes - 1);
    out.push_back(sum * h / 3.0);
  }
  return out;
}

std::vector<std::vector<double>> simplexGrid(std::size_t costs, std::size_t pointsPerEdge) {
  if (costs == 0 || pointsPerEdge == 0) throw ModelError("simplex grid needs at least one cost and one point");
  std::vector<std::vector<double>> out;
  if (pointsPerEdge == 1) {
    // Barycentre of the simplex.
    out.emplace_back(costs, -1.0 / static_cast<double>(costs));
    return out;
  }
  std::vector<std::size_t> parts;
  enumerateSimplex(costs, pointsPerEdge - 1, pointsPerEdge - 1, parts, out);
  return out;
}

std::vector<OutcomePoint> sweep(const ControlProblem& p, const ControlLaw& law, std::span<const double> xA,
                                const CostatePolicy& costate, const std::vector<std::vector<double>>& lambdaGrid,
                                const SweepOptions& options, Execution exec) {
  if (lambdaGrid.empty()) throw ModelError("multiplier grid is empty");
  const Hamiltonian h = buildHamiltonianP(p);
  const std::size_t steps = options.steps + options.steps % 2;
  std::vector<OutcomePoint> out(lambdaGrid.size());
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < lambdaGrid.size(); ++i)
      out[i] = runPoint(p, h, law, xA, costate, lambdaGrid[i], options, steps);
  } else {
    const auto count = static_cast<std::int64_t>(lambdaGrid.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] =
          runPoint(p, h, law, xA, costate, lambdaGrid[static_cast<std::size_t>(i)], options, steps);
  }
  return out;
}

std::vector<bool> nonDominatedMask(const std::vector<OutcomePoint>& points, double tieTolerance) {
  std::size_t costs = 0;
  bool first = true;
  for (const auto& pt : points) {
    if (!pt.ok()) continue;
    if (first) costs = pt.costs.size();
    else if (pt.costs.size() != costs) throw ModelError("outcome points have different numbers of costs");
    first = false;
  }
  std::vector<bool> kept(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].ok()) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j)
      dominated = j != i && points[j].ok() && dominates(points[j].costs, points[i].costs, tieTolerance);
    kept[i] = !dominated;
  }
  return kept;
}

std::vector<OutcomePoint> filterDominated(const std::vector<OutcomePoint>& points, double tieTolerance) {
  const std::vector<bool> kept = nonDominatedMask(points, tieTolerance);
  std::vector<OutcomePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (kept[i]) out.push_back(points[i]);
  return out;
}

void writeSweepCsv(std::ostream& out, const std::vector<OutcomePoint>& points, std::size_t costs,
                   const std::string& comment, bool dedupe) {
  std::vector<bool> kept = nonDominatedMask(points);
  if (dedupe) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!kept[i]) continue;
      for (std::size_t j = 0; j < i; ++j) {
        if (kept[j] && !dominates(points[j].costs, points[i].costs, 1e-9) &&
            !dominates(points[i].costs, points[j].costs, 1e-9)) {
          bool equal = true;
          for (std::size_t c = 0; c < costs && equal; ++c) equal = std::abs(points[i].costs[c] - points[j].costs[c]) <= 1e-9;
          if (equal) {
            kept[i] = false;
            break;
          }
        }
      }
    }
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  for (std::size_t j = 0; j < costs; ++j) out << "lambda" << j + 1 << ',';
  for (std::size_t j = 0; j < costs; ++j) out << 'I' << j + 1 << ',';
  out << "kept,failure\n";
  char buf[64];
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (double v : points[i].lambda) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    for (double v : points[i].costs) {
      if (std::isnan(v)) out << ',';
      else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << ',';
      }
    }
    std::string failure = points[i].failure;
    for (auto& ch : failure)
      if (ch == '"') ch = '\'';
    out << (kept[i] ? 1 : 0) << ',';
    if (!failure.empty()) out << '"' << failure << '"';
    out << '\n';
  }
}

}  // namespace noether
