#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noether/expr.hpp"

namespace noether {

/// P1: scalar cost with isoperimetric constraints and cost multiplier psi0.
/// P:  vector cost, no constraints, multipliers lambda1..lambdaN.
enum class ProblemForm { P1, P };

enum class ConstraintKind { Equality, Inequality };

struct IsoConstraint {
  Expr g;
  double xi = 0.0;
  ConstraintKind kind = ConstraintKind::Equality;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool bounded() const noexcept;
  bool contains(double v, double slack = 0.0) const noexcept { return v >= lo - slack && v <= hi + slack; }
  double width() const noexcept { return hi - lo; }
};

std::string stateName(std::size_t i);     // x1, x2, ...   (0-based argument)
std::string controlName(std::size_t j);   // u1, u2, ...
std::string costateName(std::size_t i);   // psi1, psi2, ...
std::string multiplierName(std::size_t j);  // lambda1, ...

struct ControlProblem {
  std::size_t n = 0;  // state dimension
  std::size_t r = 0;  // control dimension
  double a = 0.0;
  double b = 1.0;
  std::optional<std::vector<double>> alpha;
  std::optional<std::vector<double>> beta;
  std::vector<Expr> phi;  // n entries
  std::vector<Expr> L;    // N entries
  std::vector<IsoConstraint> constraints;  // equalities first, then inequalities
  std::vector<Interval> omega;             // r entries
  /// Open state domain enforced along integrated trajectories; empty means
  /// unbounded, otherwise n entries.
  std::vector<Interval> stateDomain;
  std::map<std::string, double> constants;

  std::size_t costCount() const noexcept { return L.size(); }
  std::size_t equalityCount() const noexcept;
  std::size_t inequalityCount() const noexcept { return constraints.size() - equalityCount(); }

  /// Checks dimensions, ordering, a < b and that every expression uses only
  /// t, x*, u* and declared constants. Throws ModelError.
  void validate() const;
};

/// Everything needed to lay out and evaluate expressions of one problem form.
struct Signature {
  std::size_t n = 0;
  std::size_t r = 0;
  ProblemForm form = ProblemForm::P;
  std::size_t multiplierCount = 0;  // k+m for P1, N for P
  std::size_t equalityCount = 0;    // P1 only
  std::map<std::string, double> constants;

  bool compatible(const Signature& other) const noexcept {
    return n == other.n && r == other.r && form == other.form && multiplierCount == other.multiplierCount;
  }
};

Signature signatureOf(const ControlProblem& p, ProblemForm form);

/// Slot layout: t, x1..xn, u1..ur, s, [psi0], psi1..psin, lambda1..lambdaM,
/// then the problem constants.
class ProblemLayout {
public:
  explicit ProblemLayout(const Signature& sig);

  const VarLayout& vars() const noexcept { return vars_; }
  const Signature& signature() const noexcept { return sig_; }

  /// Zero-filled point with constants already bound.
  std::vector<double> makePoint() const;

  std::size_t t() const noexcept { return 0; }
  std::size_t x(std::size_t i) const noexcept { return 1 + i; }
  std::size_t u(std::size_t j) const noexcept { return 1 + sig_.n + j; }
  std::size_t s() const noexcept { return 1 + sig_.n + sig_.r; }
  /// Throws UnboundVariable for the P form.
  std::size_t psi0() const;
  std::size_t psi(std::size_t i) const noexcept { return psiBase_ + i; }
  std::size_t lambda(std::size_t j) const noexcept { return lambdaBase_ + j; }

  CompiledExpr compile(const Expr& e) const { return CompiledExpr(e, vars_); }
  Env toEnv(std::span<const double> point) const;

private:
  Signature sig_;
  VarLayout vars_;
  std::size_t psiBase_ = 0;
  std::size_t lambdaBase_ = 0;
};

struct Multipliers {
  double psi0 = 0.0;           // P1 only
  std::vector<double> lambda;  // P1: k+m entries; P: N entries

  /// Sign and length checks per form. Throws ModelError.
  void validate(const Signature& sig) const;
};

struct Hamiltonian {
  Expr expr;
  Signature signature;
};

/// psi0*L + sum psi_i*phi_i + sum lambda_j*g_j. Requires exactly one cost.
Hamiltonian buildHamiltonianP1(const ControlProblem& p);
/// sum lambda_i*L_i + sum psi_j*phi_j. Requires no isoperimetric constraints.
Hamiltonian buildHamiltonianP(const ControlProblem& p);
/// Right-hand side of the adjoint equation, -dH/dx_i for each state.
std::vector<Expr> adjointRHS(const Hamiltonian& h);

/// Writes the multipliers into their slots of a point.
void bindMultipliers(const ProblemLayout& layout, const Multipliers& m, std::span<double> point);

}  // namespace noether
