#include "noether/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <Eigen/Dense>

namespace noether {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

/// Compiled Hamiltonian system for one multiplier set and control law.
class ExtremalSystem {
public:
  ExtremalSystem(const Hamiltonian& h, const std::vector<Expr>& phi, const Multipliers& m,
                 const std::vector<Interval>& omega, const ControlLaw& law)
      : layout_(h.signature), omega_(omega), law_(law), multipliers_(m) {
    m.validate(h.signature);
    if (omega.size() != h.signature.r) throw ModelError("omega must have one interval per control");
    hamiltonian_ = layout_.compile(h.expr);
    for (const auto& f : phi) phi_.push_back(layout_.compile(f));
    for (const auto& f : adjointRHS(h)) adjoint_.push_back(layout_.compile(f));
    point_ = layout_.makePoint();
    bindMultipliers(layout_, m, point_);
  }

  std::size_t n() const noexcept { return layout_.signature().n; }
  std::size_t r() const noexcept { return layout_.signature().r; }
  const ProblemLayout& layout() const noexcept { return layout_; }

  HamiltonianState state(double t, std::span<const double> x, std::span<const double> psi) const {
    HamiltonianState s;
    s.t = t;
    s.x = x;
    s.psi = psi;
    s.psi0 = multipliers_.psi0;
    s.lambda = multipliers_.lambda;
    return s;
  }

  void setState(double t, std::span<const double> x, std::span<const double> psi) {
    point_[layout_.t()] = t;
    for (std::size_t i = 0; i < n(); ++i) {
      point_[layout_.x(i)] = x[i];
      point_[layout_.psi(i)] = psi[i];
    }
  }

  double hamiltonianAt(std::span<const double> u) {
    for (std::size_t j = 0; j < r(); ++j) point_[layout_.u(j)] = u[j];
    return hamiltonian_(point_);
  }

  std::vector<double> gridMaximize(const GridSearch& grid) {
    const std::size_t dims = r();
    std::vector<double> best(dims);
    if (dims == 0) return best;
    for (const auto& box : omega_)
      if (!box.bounded()) throw ModelError("grid-search control maximization requires a bounded control set");
    const std::size_t res = std::max<std::size_t>(grid.resolution, 2);
    const double total = std::pow(static_cast<double>(res), static_cast<double>(dims));
    if (total > 1e7) throw ModelError("grid-search control grid too large");

    auto coord = [&](std::size_t d, std::size_t k) {
      if (k + 1 == res) return omega_[d].hi;
      return omega_[d].lo + omega_[d].width() * static_cast<double>(k) / static_cast<double>(res - 1);
    };

    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> u(dims);
    double bestValue = -std::numeric_limits<double>::infinity();
    // Lexicographic order with u1 slowest; only strict improvements replace.
    for (;;) {
      for (std::size_t d = 0; d < dims; ++d) u[d] = coord(d, idx[d]);
      const double v = hamiltonianAt(u);
      if (v > bestValue) {
        bestValue = v;
        best = u;
      }
      bool done = true;
      for (std::size_t d = dims; d-- > 0;) {
        if (++idx[d] < res) {
          done = false;
          break;
        }
        idx[d] = 0;
      }
      if (done) break;
    }

    for (std::size_t d = 0; d < dims; ++d) {
      const double cell = omega_[d].width() / static_cast<double>(res - 1);
      double lo = std::max(omega_[d].lo, best[d] - cell);
      double hi = std::min(omega_[d].hi, best[d] + cell);
      std::vector<double> trial = best;
      auto value = [&](double c) {
        trial[d] = c;
        return hamiltonianAt(trial);
      };
      double x1 = hi - kInvPhi * (hi - lo);
      double x2 = lo + kInvPhi * (hi - lo);
      double f1 = value(x1);
      double f2 = value(x2);
      double candidate = f1 >= f2 ? x1 : x2;
      double candidateValue = std::max(f1, f2);
      for (std::size_t it = 0; it < grid.refinements; ++it) {
        if (f1 >= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - kInvPhi * (hi - lo);
          f1 = value(x1);
          if (f1 > candidateValue) {
            candidateValue = f1;
            candidate = x1;
          }
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + kInvPhi * (hi - lo);
          f2 = value(x2);
          if (f2 > candidateValue) {
            candidateValue = f2;
            candidate = x2;
          }
        }
      }
      if (candidateValue > bestValue) {
        bestValue = candidateValue;
        best[d] = candidate;
      }
    }
    return best;
  }

  std::vector<double> maximize(double t, std::span<const double> x, std::span<const double> psi,
                               const MaximizeOptions& options = {}) {
    setState(t, x, psi);
    if (const auto* grid = std::get_if<GridSearch>(&law_)) return gridMaximize(*grid);
    const auto& analytic = std::get<AnalyticLaw>(law_);
    std::optional<std::vector<double>> u = analytic.control(state(t, x, psi));
    if (!u) return gridMaximize(analytic.fallback);
    if (u->size() != r()) throw ControlLawError("analytic control law returned the wrong number of controls");
    for (std::size_t j = 0; j < r(); ++j)
      if (!omega_[j].contains((*u)[j], 1e-12))
        throw ControlLawError("analytic control law left the control set in " + controlName(j));
    if (options.audit && std::all_of(omega_.begin(), omega_.end(), [](const Interval& b) { return b.bounded(); })) {
      const double analyticValue = hamiltonianAt(*u);
      const std::vector<double> g = gridMaximize(options.auditGrid);
      const double gridValue = hamiltonianAt(g);
      if (analyticValue < gridValue - options.auditTolerance)
        throw ControlLawError("analytic control law is not maximal: H(analytic) = " + std::to_string(analyticValue) +
                              ", H(grid) = " + std::to_string(gridValue));
    }
    return *u;
  }

  /// Derivatives of (x, psi) at the given state; returns the maximizing u.
  std::vector<double> derivative(double t, std::span<const double> x, std::span<const double> psi,
                                 std::span<double> dx, std::span<double> dpsi) {
    std::vector<double> u = maximize(t, x, psi);
    setState(t, x, psi);
    for (std::size_t j = 0; j < r(); ++j) point_[layout_.u(j)] = u[j];
    for (std::size_t i = 0; i < n(); ++i) {
      dx[i] = phi_[i](point_);
      dpsi[i] = adjoint_[i](point_);
    }
    return u;
  }

  /// One RK4 step of length dt.
  void step(double t, std::span<const double> x, std::span<const double> psi, double dt, std::span<double> xOut,
            std::span<double> psiOut) {
    const std::size_t dim = n();
    std::vector<double> k(8 * dim), xs(dim), ps(dim);
    auto kx = [&](int s) { return std::span<double>(k.data() + 2 * s * dim, dim); };
    auto kp = [&](int s) { return std::span<double>(k.data() + (2 * s + 1) * dim, dim); };
    derivative(t, x, psi, kx(0), kp(0));
    const double c[3] = {0.5, 0.5, 1.0};
    for (int s = 1; s < 4; ++s) {
      for (std::size_t i = 0; i < dim; ++i) {
        xs[i] = x[i] + c[s - 1] * dt * kx(s - 1)[i];
        ps[i] = psi[i] + c[s - 1] * dt * kp(s - 1)[i];
      }
      derivative(t + c[s - 1] * dt, xs, ps, kx(s), kp(s));
    }
    for (std::size_t i = 0; i < dim; ++i) {
      xOut[i] = x[i] + dt / 6.0 * (kx(0)[i] + 2.0 * kx(1)[i] + 2.0 * kx(2)[i] + kx(3)[i]);
      psiOut[i] = psi[i] + dt / 6.0 * (kp(0)[i] + 2.0 * kp(1)[i] + 2.0 * kp(2)[i] + kp(3)[i]);
    }
  }

private:
  ProblemLayout layout_;
  std::vector<Interval> omega_;
  ControlLaw law_;
  Multipliers multipliers_;
  CompiledExpr hamiltonian_;
  std::vector<CompiledExpr> phi_;
  std::vector<CompiledExpr> adjoint_;
  std::vector<double> point_;
};

void fillNodePoint(const ProblemLayout& layout, const Trajectory& traj, std::size_t k, std::span<double> point) {
  point[layout.t()] = traj.t[k];
  for (std::size_t i = 0; i < traj.signature.n; ++i) {
    point[layout.x(i)] = traj.x[k][i];
    point[layout.psi(i)] = traj.psi[k][i];
  }
  for (std::size_t j = 0; j < traj.signature.r; ++j) point[layout.u(j)] = traj.u[k][j];
}

void checkShapes(const ControlProblem& p, const Hamiltonian& h, std::size_t xa, std::size_t psia) {
  if (h.signature.n != p.n || h.signature.r != p.r) throw ModelError("Hamiltonian does not match the problem");
  if (xa != p.n || psia != p.n) throw ModelError("initial state and costate must have length n");
}

}  // namespace

AnalyticLaw analyticLawFromExprs(const std::vector<Expr>& controls, const Signature& sig, std::optional<Expr> switching,
                                 std::size_t switchedControl) {
  if (controls.size() != sig.r) throw ModelError("analytic law needs one expression per control");
  auto layout = std::make_shared<const ProblemLayout>(sig);
  auto compiled = std::make_shared<std::vector<CompiledExpr>>();
  std::string description;
  for (const auto& c : controls) {
    compiled->push_back(layout->compile(c));
    description += (description.empty() ? "" : ", ") + print(c);
  }
  auto fill = [layout](const HamiltonianState& s) {
    std::vector<double> point = layout->makePoint();
    point[layout->t()] = s.t;
    for (std::size_t i = 0; i < layout->signature().n; ++i) {
      point[layout->x(i)] = s.x[i];
      point[layout->psi(i)] = s.psi[i];
    }
    if (layout->signature().form == ProblemForm::P1) point[layout->psi0()] = s.psi0;
    for (std::size_t j = 0; j < s.lambda.size(); ++j) point[layout->lambda(j)] = s.lambda[j];
    return point;
  };

  AnalyticLaw law;
  law.description = description;
  law.switchedControl = switchedControl;
  law.control = [compiled, fill](const HamiltonianState& s) -> std::optional<std::vector<double>> {
    const std::vector<double> point = fill(s);
    std::vector<double> u;
    for (const auto& c : *compiled) u.push_back(c(point));
    return u;
  };
  if (switching) {
    auto sigma = std::make_shared<const CompiledExpr>(layout->compile(*switching));
    law.switching = [sigma, fill](const HamiltonianState& s) { return (*sigma)(fill(s)); };
  }
  return law;
}

std::vector<double> maximizeH(const Hamiltonian& h, double t, std::span<const double> x, std::span<const double> psi,
                              const Multipliers& m, const std::vector<Interval>& omega, const ControlLaw& law,
                              const MaximizeOptions& options) {
  // The state equations do not enter the maximization.
  ExtremalSystem sys(h, {}, m, omega, law);
  return sys.maximize(t, x, psi, options);
}

Trajectory integrateExtremal(const ControlProblem& p, const Hamiltonian& h, std::span<const double> xA,
                             std::span<const double> psiA, const Multipliers& m, const ControlLaw& law,
                             std::size_t steps) {
  checkShapes(p, h, xA.size(), psiA.size());
  if (steps < 2) throw ModelError("at least 2 integration steps are required");
  ExtremalSystem sys(h, p.phi, m, p.omega, law);
  const double dt = (p.b - p.a) / static_cast<double>(steps);

  Trajectory traj;
  traj.multipliers = m;
  traj.signature = h.signature;
  traj.t.reserve(steps + 1);

  std::vector<double> x(xA.begin(), xA.end());
  std::vector<double> psi(psiA.begin(), psiA.end());
  std::vector<double> xNext(p.n), psiNext(p.n);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = k == steps ? p.b : p.a + dt * static_cast<double>(k);
    try {
      std::vector<double> u = sys.maximize(t, x, psi);
      traj.t.push_back(t);
      traj.x.push_back(x);
      traj.psi.push_back(psi);
      traj.u.push_back(std::move(u));
      if (k == steps) break;
      sys.step(t, x, psi, dt, xNext, psiNext);
      for (std::size_t i = 0; i < p.n; ++i) {
        if (!std::isfinite(xNext[i]) || !std::isfinite(psiNext[i]))
          throw DomainError("non-finite state", "t = " + std::to_string(t + dt));
        if (!p.stateDomain.empty() && !(xNext[i] > p.stateDomain[i].lo && xNext[i] < p.stateDomain[i].hi))
          throw DomainError(stateName(i) + " left its domain", "t = " + std::to_string(t + dt));
      }
    } catch (const DomainError& err) {
      throw IntegrationError("integration failed near t = " + std::to_string(t) + ": " + err.what(), std::move(traj));
    }
    x.swap(xNext);
    psi.swap(psiNext);
  }
  return traj;
}

ConservationReport checkLaw(const Trajectory& traj, const ConservationLaw& law, double tolerance) {
  if (!traj.signature.compatible(law.signature))
    throw ModelError("trajectory and conservation law belong to different problem forms");
  if (traj.nodes() == 0) throw ModelError("empty trajectory");
  const ProblemLayout layout(law.signature);
  const CompiledExpr c = layout.compile(law.expr);
  std::vector<double> point = layout.makePoint();
  bindMultipliers(layout, traj.multipliers, point);

  ConservationReport report;
  report.tolerance = tolerance;
  for (std::size_t k = 0; k < traj.nodes(); ++k) {
    fillNodePoint(layout, traj, k, point);
    const double v = c(point);
    if (k == 0) {
      report.initial = v;
      continue;
    }
    const double drift = std::abs(v - report.initial);
    if (drift > report.maxDrift) {
      report.maxDrift = drift;
      report.worstTime = traj.t[k];
    }
  }
  report.normalizedDrift = report.maxDrift / (1.0 + std::abs(report.initial));
  report.pass = report.normalizedDrift <= tolerance;
  return report;
}

double defaultLawTolerance(double h, bool switchPresent) {
  const double smooth = 1e6 * h * h * h * h;
  return switchPresent ? std::max(smooth, 50.0 * h) : smooth;
}

HamiltonianIdentityReport checkHamiltonianIdentity(const Trajectory& traj, const Hamiltonian& h, double tolerance,
                                                   double jumpThreshold) {
  if (!traj.signature.compatible(h.signature)) throw ModelError("trajectory and Hamiltonian forms differ");
  const ProblemLayout layout(h.signature);
  const CompiledExpr hc = layout.compile(h.expr);
  const CompiledExpr dhdt = layout.compile(diff(h.expr, "t"));
  std::vector<double> point = layout.makePoint();
  bindMultipliers(layout, traj.multipliers, point);

  const std::size_t nodes = traj.nodes();
  std::vector<double> values(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    fillNodePoint(layout, traj, k, point);
    values[k] = hc(point);
  }
  auto jumps = [&](std::size_t k) {
    for (std::size_t j = 0; j < traj.signature.r; ++j)
      if (std::abs(traj.u[k + 1][j] - traj.u[k][j]) > jumpThreshold) return true;
    return false;
  };

  HamiltonianIdentityReport report;
  report.tolerance = tolerance;
  for (std::size_t k = 1; k + 1 < nodes; ++k) {
    if (jumps(k - 1) || jumps(k)) {
      ++report.nodesExcluded;
      continue;
    }
    fillNodePoint(layout, traj, k, point);
    const double fd = (values[k + 1] - values[k - 1]) / (traj.t[k + 1] - traj.t[k - 1]);
    const double residual = std::abs(fd - dhdt(point));
    ++report.nodesChecked;
    if (residual > report.worstResidual) {
      report.worstResidual = residual;
      report.worstTime = traj.t[k];
    }
  }
  report.pass = report.nodesChecked > 0 && report.worstResidual <= tolerance;
  return report;
}

SwitchReport detectSwitches(const ControlProblem& p, const Hamiltonian& h, const Trajectory& traj,
                            const AnalyticLaw& law) {
  if (!law.switching) throw ModelError("control law declares no switching function");
  ExtremalSystem sys(h, p.phi, traj.multipliers, p.omega, law);
  const std::size_t nodes = traj.nodes();
  std::vector<double> sigma(nodes);
  for (std::size_t k = 0; k < nodes; ++k) sigma[k] = law.switching(sys.state(traj.t[k], traj.x[k], traj.psi[k]));

  SwitchReport report;
  report.singular = std::all_of(sigma.begin(), sigma.end(), [](double v) { return std::abs(v) <= 1e-12; });
  if (report.singular) return report;

  std::vector<double> x(p.n), psi(p.n);
  auto sigmaAt = [&](std::size_t k, double theta) {
    if (theta == 0.0) return sigma[k];
    sys.step(traj.t[k], traj.x[k], traj.psi[k], theta, x, psi);
    return law.switching(sys.state(traj.t[k] + theta, x, psi));
  };
  for (std::size_t k = 0; k + 1 < nodes; ++k) {
    if (sigma[k] == 0.0) {
      if (k > 0 && sigma[k - 1] * sigma[k + 1] < 0.0) report.times.push_back(traj.t[k]);
      continue;
    }
    if (sigma[k] * sigma[k + 1] >= 0.0) continue;
    double lo = 0.0;
    double hi = traj.t[k + 1] - traj.t[k];
    const double signLo = sigma[k] > 0.0 ? 1.0 : -1.0;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (sigmaAt(k, mid) * signLo > 0.0) lo = mid;
      else hi = mid;
    }
    report.times.push_back(traj.t[k] + 0.5 * (lo + hi));
  }
  return report;
}

ShootResult shoot(const ControlProblem& p, const Hamiltonian& h, const Multipliers& m, const ControlLaw& law,
                  std::size_t steps, const ShootOptions& options) {
  if (!p.alpha || !p.beta) throw ModelError("shooting needs both boundary vectors alpha and beta");
  const std::size_t n = p.n;
  const std::vector<double>& alpha = *p.alpha;
  const std::vector<double>& beta = *p.beta;

  struct Evaluation {
    Eigen::VectorXd residual;
    std::optional<Trajectory> trajectory;
  };
  auto evaluate = [&](const Eigen::VectorXd& psiA) -> Evaluation {
    std::vector<double> psi(psiA.data(), psiA.data() + n);
    try {
      Trajectory traj = integrateExtremal(p, h, alpha, psi, m, law, steps);
      Eigen::VectorXd r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = traj.x.back()[i] - beta[i];
      return {r, std::move(traj)};
    } catch (const IntegrationError&) {
      return {Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity()), std::nullopt};
    }
  };
  auto normInf = [](const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); };
  auto toStd = [n](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + n); };

  Eigen::VectorXd psiA = Eigen::VectorXd::Zero(n);
  if (options.initialGuess) {
    if (options.initialGuess->size() != n) throw ModelError("initial costate guess must have length n");
    for (std::size_t i = 0; i < n; ++i) psiA[i] = (*options.initialGuess)[i];
  }
  Evaluation current = evaluate(psiA);
  if (!current.trajectory)
    throw ShootingError("integration fails at the initial costate guess", toStd(psiA), normInf(current.residual), 0);
  double norm = normInf(current.residual);

  for (std::size_t iter = 0;; ++iter) {
    if (norm <= options.tolerance) return {toStd(psiA), std::move(*current.trajectory), iter, norm};
    if (iter == options.maxIterations)
      throw ShootingError("shooting did not converge after " + std::to_string(iter) +
                              " iterations, residual " + std::to_string(norm),
                          toStd(psiA), norm, iter);

    Eigen::MatrixXd jac(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::VectorXd probe = psiA;
      const double step = options.fdStep * (1.0 + std::abs(psiA[j]));
      probe[j] += step;
      Evaluation e = evaluate(probe);
      if (!e.trajectory)
        throw ShootingError("integration fails while forming sensitivities", toStd(psiA), norm, iter);
      jac.col(j) = (e.residual - current.residual) / step;
    }
    const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-current.residual);

    bool improved = false;
    double damping = 1.0;
    for (int halving = 0; halving < 30; ++halving, damping *= 0.5) {
      Eigen::VectorXd trial = psiA + damping * delta;
      Evaluation e = evaluate(trial);
      const double trialNorm = normInf(e.residual);
      if (e.trajectory && trialNorm < norm) {
        psiA = trial;
        current = std::move(e);
        norm = trialNorm;
        improved = true;
        break;
      }
    }
    if (!improved)
      throw ShootingError("shooting stalled: no damped Newton step reduces the residual " + std::to_string(norm),
                          toStd(psiA), norm, iter + 1);
  }
}

void writeTrajectoryCsv(std::ostream& out, const Trajectory& traj, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << 't';
  for (std::size_t i = 0; i < traj.signature.n; ++i) out << ',' << stateName(i);
  for (std::size_t j = 0; j < traj.signature.r; ++j) out << ',' << controlName(j);
  for (std::size_t i = 0; i < traj.signature.n; ++i) out << ',' << costateName(i);
  out << '\n';
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.nodes(); ++k) {
    emit(traj.t[k]);
    for (double v : traj.x[k]) out << ',', emit(v);
    for (double v : traj.u[k]) out << ',', emit(v);
    for (double v : traj.psi[k]) out << ',', emit(v);
    out << '\n';
  }
}

}  // namespace noether
