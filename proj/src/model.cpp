#include "noether/model.hpp"

#include <algorithm>
#include <cmath>

namespace noether {

bool Interval::bounded() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }

std::string stateName(std::size_t i) { return "x" + std::to_string(i + 1); }
std::string controlName(std::size_t j) { return "u" + std::to_string(j + 1); }
std::string costateName(std::size_t i) { return "psi" + std::to_string(i + 1); }
std::string multiplierName(std::size_t j) { return "lambda" + std::to_string(j + 1); }

std::size_t ControlProblem::equalityCount() const noexcept {
  return static_cast<std::size_t>(std::count_if(constraints.begin(), constraints.end(),
                                                [](const IsoConstraint& c) { return c.kind == ConstraintKind::Equality; }));
}

namespace {

void checkVariables(const Expr& e, const ControlProblem& p, const std::string& where) {
  for (const auto& name : freeVariables(e)) {
    if (name == "t" || p.constants.count(name)) continue;
    bool ok = false;
    for (std::size_t i = 0; i < p.n && !ok; ++i) ok = name == stateName(i);
    for (std::size_t j = 0; j < p.r && !ok; ++j) ok = name == controlName(j);
    if (!ok) throw ModelError(where + " references undeclared variable '" + name + "'");
  }
}

}  // namespace

void ControlProblem::validate() const {
  if (n == 0) throw ModelError("state dimension n must be positive");
  if (!(a < b)) throw ModelError("initial time a must be smaller than terminal time b");
  if (phi.size() != n) throw ModelError("phi must have exactly n = " + std::to_string(n) + " entries");
  if (L.empty()) throw ModelError("at least one cost integrand is required");
  if (omega.size() != r) throw ModelError("omega must have exactly r = " + std::to_string(r) + " entries");
  for (std::size_t j = 0; j < r; ++j)
    if (!(omega[j].lo <= omega[j].hi)) throw ModelError("omega[" + std::to_string(j) + "] is empty");
  if (!stateDomain.empty() && stateDomain.size() != n)
    throw ModelError("stateDomain must be empty or have exactly n = " + std::to_string(n) + " entries");
  if (alpha && alpha->size() != n) throw ModelError("alpha must have length n");
  if (beta && beta->size() != n) throw ModelError("beta must have length n");
  bool seenInequality = false;
  for (const auto& c : constraints) {
    if (c.kind == ConstraintKind::Inequality) seenInequality = true;
    else if (seenInequality) throw ModelError("equality constraints must precede inequality constraints");
  }
  for (const auto& [name, value] : constants) {
    if (name == "t" || name == "s" || isFunctionName(name)) throw ModelError("constant name '" + name + "' is reserved");
  }
  for (std::size_t i = 0; i < n; ++i) checkVariables(phi[i], *this, "phi[" + std::to_string(i) + "]");
  for (std::size_t i = 0; i < L.size(); ++i) checkVariables(L[i], *this, "L[" + std::to_string(i) + "]");
  for (std::size_t j = 0; j < constraints.size(); ++j)
    checkVariables(constraints[j].g, *this, "constraint g[" + std::to_string(j) + "]");
}

Signature signatureOf(const ControlProblem& p, ProblemForm form) {
  Signature sig;
  sig.n = p.n;
  sig.r = p.r;
  sig.form = form;
  sig.multiplierCount = form == ProblemForm::P1 ? p.constraints.size() : p.costCount();
  sig.equalityCount = form == ProblemForm::P1 ? p.equalityCount() : 0;
  sig.constants = p.constants;
  return sig;
}

ProblemLayout::ProblemLayout(const Signature& sig) : sig_(sig) {
  vars_.add("t");
  for (std::size_t i = 0; i < sig.n; ++i) vars_.add(stateName(i));
  for (std::size_t j = 0; j < sig.r; ++j) vars_.add(controlName(j));
  vars_.add("s");
  if (sig.form == ProblemForm::P1) vars_.add("psi0");
  psiBase_ = vars_.size();
  for (std::size_t i = 0; i < sig.n; ++i) vars_.add(costateName(i));
  lambdaBase_ = vars_.size();
  for (std::size_t j = 0; j < sig.multiplierCount; ++j) vars_.add(multiplierName(j));
  for (const auto& [name, value] : sig.constants) {
    if (vars_.contains(name)) throw ModelError("constant '" + name + "' collides with a problem variable");
    vars_.add(name);
  }
}

std::size_t ProblemLayout::psi0() const {
  if (sig_.form != ProblemForm::P1) throw UnboundVariable("psi0");
  return s() + 1;
}

std::vector<double> ProblemLayout::makePoint() const {
  std::vector<double> point(vars_.size(), 0.0);
  for (const auto& [name, value] : sig_.constants) point[vars_.index(name)] = value;
  return point;
}

Env ProblemLayout::toEnv(std::span<const double> point) const {
  Env env;
  for (std::size_t k = 0; k < vars_.size(); ++k) env.set(vars_.names()[k], point[k]);
  return env;
}

void Multipliers::validate(const Signature& sig) const {
  if (lambda.size() != sig.multiplierCount)
    throw ModelError("expected " + std::to_string(sig.multiplierCount) + " multipliers lambda, got " +
                     std::to_string(lambda.size()));
  for (double v : lambda)
    if (!std::isfinite(v)) throw ModelError("multipliers must be finite");
  if (sig.form == ProblemForm::P1) {
    if (!std::isfinite(psi0) || psi0 > 0.0) throw ModelError("cost multiplier psi0 must satisfy psi0 <= 0");
    for (std::size_t j = sig.equalityCount; j < lambda.size(); ++j)
      if (lambda[j] > 0.0)
        throw ModelError("inequality multiplier lambda" + std::to_string(j + 1) + " must be <= 0");
  } else {
    for (std::size_t j = 0; j < lambda.size(); ++j)
      if (lambda[j] > 0.0) throw ModelError("multiplier lambda" + std::to_string(j + 1) + " must be <= 0");
  }
}

Hamiltonian buildHamiltonianP1(const ControlProblem& p) {
  if (p.costCount() != 1)
    throw ModelError("the P1 Hamiltonian needs exactly one cost integrand, got " + std::to_string(p.costCount()));
  Expr h = Expr::variable("psi0") * p.L[0];
  for (std::size_t i = 0; i < p.n; ++i) h = h + Expr::variable(costateName(i)) * p.phi[i];
  for (std::size_t j = 0; j < p.constraints.size(); ++j)
    h = h + Expr::variable(multiplierName(j)) * p.constraints[j].g;
  return {simplify(h), signatureOf(p, ProblemForm::P1)};
}

Hamiltonian buildHamiltonianP(const ControlProblem& p) {
  if (!p.constraints.empty()) throw ModelError("the P Hamiltonian does not admit isoperimetric constraints");
  if (p.costCount() == 0) throw ModelError("at least one cost integrand is required");
  Expr h = Expr::variable(multiplierName(0)) * p.L[0];
  for (std::size_t i = 1; i < p.costCount(); ++i) h = h + Expr::variable(multiplierName(i)) * p.L[i];
  for (std::size_t i = 0; i < p.n; ++i) h = h + Expr::variable(costateName(i)) * p.phi[i];
  return {simplify(h), signatureOf(p, ProblemForm::P)};
}

std::vector<Expr> adjointRHS(const Hamiltonian& h) {
  std::vector<Expr> out;
  out.reserve(h.signature.n);
  for (std::size_t i = 0; i < h.signature.n; ++i) out.push_back(simplify(-diff(h.expr, stateName(i))));
  return out;
}

void bindMultipliers(const ProblemLayout& layout, const Multipliers& m, std::span<double> point) {
  if (layout.signature().form == ProblemForm::P1) point[layout.psi0()] = m.psi0;
  for (std::size_t j = 0; j < m.lambda.size() && j < layout.signature().multiplierCount; ++j)
    point[layout.lambda(j)] = m.lambda[j];
}

}  // namespace noether
