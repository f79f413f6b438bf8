#include "noether/symmetry.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <omp.h>

namespace noether {

namespace {

std::vector<std::uint64_t> firstPrimes(std::size_t count) {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (auto p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radicalInverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

std::map<std::string, Expr> groupBindings(const ControlProblem& p, const OneParamGroup& grp) {
  std::map<std::string, Expr> bind;
  bind["t"] = grp.T;
  for (std::size_t i = 0; i < p.n; ++i) bind[stateName(i)] = grp.X[i];
  for (std::size_t j = 0; j < p.r; ++j) bind[controlName(j)] = grp.U[j];
  return bind;
}

/// Sum of lhs terms must equal sum of rhs terms; residuals are scaled by
/// 1 + sum |rhs term|.
struct Condition {
  std::string name;
  std::vector<CompiledExpr> lhs;
  std::vector<CompiledExpr> rhs;
};

struct Worst {
  double value = -1.0;
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void offer(double v, std::size_t i) {
    if (v > value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
};

struct Partial {
  std::vector<Worst> worst;
  std::size_t skipped = 0;
  std::size_t domainFailures = 0;
  std::size_t firstErrorIndex = std::numeric_limits<std::size_t>::max();
  std::string firstError;

  void merge(const Partial& o) {
    for (std::size_t c = 0; c < worst.size(); ++c) worst[c].offer(o.worst[c].value, o.worst[c].index);
    skipped += o.skipped;
    domainFailures += o.domainFailures;
    if (o.firstErrorIndex < firstErrorIndex) {
      firstErrorIndex = o.firstErrorIndex;
      firstError = o.firstError;
    }
  }
};

/// Maps sampler coordinates onto (t, x, u, s) slots of a point.
class SampleBox {
public:
  SampleBox(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg, const ProblemLayout& layout)
      : sampler_(1 + p.n + p.r + 1, cfg.seed) {
    auto addVar = [&](const std::string& name, std::size_t slot) {
      Interval box = cfg.box(name, p);
      if (!box.bounded()) throw ModelError("sampling interval for '" + name + "' must be bounded");
      names_.push_back(name);
      slots_.push_back(slot);
      boxes_.push_back(box);
    };
    addVar("t", layout.t());
    for (std::size_t i = 0; i < p.n; ++i) addVar(stateName(i), layout.x(i));
    for (std::size_t j = 0; j < p.r; ++j) addVar(controlName(j), layout.u(j));
    addVar("s", layout.s());
    const Interval& sBox = boxes_.back();
    if (!(sBox.lo > -grp.epsilon && sBox.hi < grp.epsilon))
      throw ModelError("sampling interval for s must lie inside (-epsilon, epsilon)");
  }

  void fill(std::size_t index, std::span<double> point, std::span<double> scratch) const {
    sampler_.point(index, scratch);
    for (std::size_t d = 0; d < slots_.size(); ++d)
      point[slots_[d]] = boxes_[d].lo + scratch[d] * boxes_[d].width();
  }

  std::map<std::string, double> describe(std::size_t index, const ProblemLayout& layout) const {
    std::vector<double> point = layout.makePoint();
    std::vector<double> scratch(slots_.size());
    fill(index, point, scratch);
    std::map<std::string, double> out;
    for (std::size_t d = 0; d < slots_.size(); ++d) out[names_[d]] = point[slots_[d]];
    return out;
  }

  std::size_t dimension() const noexcept { return slots_.size(); }

private:
  LowDiscrepancySampler sampler_;
  std::vector<std::string> names_;
  std::vector<std::size_t> slots_;
  std::vector<Interval> boxes_;
};

double residualOf(const Condition& c, std::span<const double> point) {
  double lhs = 0.0;
  for (const auto& e : c.lhs) lhs += e(point);
  double rhs = 0.0;
  double scale = 1.0;
  for (const auto& e : c.rhs) {
    const double v = e(point);
    rhs += v;
    scale += std::abs(v);
  }
  return std::abs(lhs - rhs) / scale;
}

void runSample(const std::vector<Condition>& conditions, const SampleBox& box, const SampleConfig& cfg,
               std::size_t index, std::vector<double>& point, std::vector<double>& scratch,
               std::vector<double>& residuals, Partial& acc) {
  box.fill(index, point, scratch);
  try {
    for (std::size_t c = 0; c < conditions.size(); ++c) residuals[c] = residualOf(conditions[c], point);
  } catch (const DomainError& err) {
    if (cfg.skipDomainErrors) {
      ++acc.skipped;
    } else {
      ++acc.domainFailures;
      if (index < acc.firstErrorIndex) {
        acc.firstErrorIndex = index;
        acc.firstError = err.what();
      }
    }
    return;
  }
  for (std::size_t c = 0; c < conditions.size(); ++c) acc.worst[c].offer(residuals[c], index);
}

InvarianceReport evaluateConditions(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg,
                                    const ProblemLayout& layout, const std::vector<Condition>& conditions,
                                    Execution exec) {
  SampleBox box(p, grp, cfg, layout);
  Partial total;
  total.worst.resize(conditions.size());

  auto makePartial = [&] {
    Partial part;
    part.worst.resize(conditions.size());
    return part;
  };

  if (exec == Execution::Serial) {
    std::vector<double> point = layout.makePoint();
    std::vector<double> scratch(box.dimension());
    std::vector<double> residuals(conditions.size());
    for (std::size_t i = 0; i < cfg.samples; ++i) runSample(conditions, box, cfg, i, point, scratch, residuals, total);
  } else {
    const auto count = static_cast<std::int64_t>(cfg.samples);
#pragma omp parallel
    {
      Partial local = makePartial();
      std::vector<double> point = layout.makePoint();
      std::vector<double> scratch(box.dimension());
      std::vector<double> residuals(conditions.size());
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < count; ++i)
        runSample(conditions, box, cfg, static_cast<std::size_t>(i), point, scratch, residuals, local);
#pragma omp critical(noether_invariance_merge)
      total.merge(local);
    }
  }

  InvarianceReport report;
  report.samples = cfg.samples;
  report.skipped = total.skipped;
  report.domainFailures = total.domainFailures;
  report.firstDomainError = total.firstError;
  report.tolerance = cfg.tolerance;
  report.notes.push_back("transformed controls are not required to stay in the control set");
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    ConditionResidual res;
    res.name = conditions[c].name;
    if (total.worst[c].index != std::numeric_limits<std::size_t>::max()) {
      res.worst = total.worst[c].value;
      res.worstPoint = box.describe(total.worst[c].index, layout);
    }
    res.pass = res.worst <= cfg.tolerance;
    report.conditions.push_back(std::move(res));
  }
  return report;
}

void addFiniteConditions(std::vector<Condition>& out, const std::string& prefix, const std::vector<Expr>& integrands,
                         const std::map<std::string, Expr>& bind, const Expr& dT, const ProblemLayout& layout) {
  for (std::size_t j = 0; j < integrands.size(); ++j) {
    Condition c;
    c.name = prefix + std::to_string(j + 1);
    c.lhs.push_back(layout.compile(simplify(integrands[j])));
    c.rhs.push_back(layout.compile(simplify(substitute(integrands[j], bind) * dT)));
    out.push_back(std::move(c));
  }
}

std::vector<Condition> finiteConditions(const ControlProblem& p, const OneParamGroup& grp, const ProblemLayout& layout,
                                        bool withConstraints) {
  const auto bind = groupBindings(p, grp);
  const Expr dT = totalTimeDerivative(grp.T, p, grp);
  std::vector<Condition> out;
  for (std::size_t i = 0; i < p.n; ++i) {
    Condition c;
    c.name = "X" + std::to_string(i + 1);
    c.lhs.push_back(layout.compile(totalTimeDerivative(grp.X[i], p, grp)));
    c.rhs.push_back(layout.compile(simplify(substitute(p.phi[i], bind) * dT)));
    out.push_back(std::move(c));
  }
  addFiniteConditions(out, "L", p.L, bind, dT, layout);
  if (withConstraints) {
    std::vector<Expr> gs;
    for (const auto& c : p.constraints) gs.push_back(c.g);
    addFiniteConditions(out, "g", gs, bind, dT, layout);
  }
  return out;
}

/// Terms of d/ds [f o h^s * dT/dt] at s = 0, excluding any lhs.
std::vector<CompiledExpr> linearizedTerms(const Expr& f, const ControlProblem& p, const Generator& gen,
                                          const Expr& dtau, const ProblemLayout& layout) {
  std::vector<Expr> terms;
  terms.push_back(diff(f, "t") * gen.tau);
  for (std::size_t i = 0; i < p.n; ++i) terms.push_back(diff(f, stateName(i)) * gen.xi[i]);
  for (std::size_t j = 0; j < p.r; ++j) terms.push_back(diff(f, controlName(j)) * gen.upsilon[j]);
  terms.push_back(f * dtau);
  std::vector<CompiledExpr> out;
  for (const auto& t : terms) {
    Expr simple = simplify(t);
    if (!simple.isConstant(0.0)) out.push_back(layout.compile(simple));
  }
  return out;
}

void checkGroupShape(const ControlProblem& p, const OneParamGroup& grp) {
  if (grp.X.size() != p.n) throw ModelError("group must define X for all " + std::to_string(p.n) + " states");
  if (grp.U.size() != p.r) throw ModelError("group must define U for all " + std::to_string(p.r) + " controls");
  if (grp.uDot && grp.uDot->size() != p.r) throw ModelError("uDot must have one entry per control");
  if (!(grp.epsilon > 0.0)) throw ModelError("group epsilon must be positive");
}

}  // namespace

OneParamGroup identityGroup(std::size_t n, std::size_t r, std::string name) {
  OneParamGroup g;
  g.name = std::move(name);
  g.T = Expr::variable("t");
  for (std::size_t i = 0; i < n; ++i) g.X.push_back(Expr::variable(stateName(i)));
  for (std::size_t j = 0; j < r; ++j) g.U.push_back(Expr::variable(controlName(j)));
  return g;
}

Generator generator(const OneParamGroup& grp) {
  const std::map<std::string, Expr> atZero{{"s", Expr::constant(0.0)}};
  auto component = [&](const Expr& e) { return simplify(substitute(diff(e, "s"), atZero)); };
  Generator gen;
  gen.tau = component(grp.T);
  for (const auto& x : grp.X) gen.xi.push_back(component(x));
  for (const auto& u : grp.U) gen.upsilon.push_back(component(u));
  return gen;
}

Expr totalTimeDerivative(const Expr& e, const ControlProblem& p, const OneParamGroup& grp) {
  Expr out = diff(e, "t");
  for (std::size_t i = 0; i < p.n; ++i) out = out + diff(e, stateName(i)) * p.phi[i];
  for (std::size_t j = 0; j < p.r; ++j) {
    Expr partial = diff(e, controlName(j));
    if (partial.isConstant(0.0)) continue;
    if (!grp.uDot)
      throw ModelError("total time derivative depends on control " + controlName(j) +
                       " but the group declares no uDot");
    out = out + partial * (*grp.uDot)[j];
  }
  return simplify(out);
}

Interval SampleConfig::box(const std::string& var, const ControlProblem& p) const {
  auto it = intervals.find(var);
  if (it != intervals.end()) return it->second;
  if (var == "t") return {p.a, p.b};
  return fallback;
}

LowDiscrepancySampler::LowDiscrepancySampler(std::size_t dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  shifts_.resize(dimension);
  for (auto& s : shifts_) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void LowDiscrepancySampler::point(std::size_t index, std::span<double> out) const {
  static const std::vector<std::uint64_t> primes = firstPrimes(256);
  if (shifts_.size() > primes.size()) throw ModelError("sampler dimension too large");
  for (std::size_t d = 0; d < shifts_.size(); ++d) {
    double v = radicalInverse(index + 1, primes[d]) + shifts_[d];
    out[d] = v >= 1.0 ? v - 1.0 : v;
  }
}

bool InvarianceReport::passed() const noexcept {
  if (domainFailures > 0) return false;
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

const ConditionResidual* InvarianceReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

void validateGroup(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg) {
  checkGroupShape(p, grp);
  auto checkNames = [&](const Expr& e, const std::string& where) {
    for (const auto& name : freeVariables(e)) {
      if (name == "t" || name == "s" || p.constants.count(name)) continue;
      bool ok = false;
      for (std::size_t i = 0; i < p.n && !ok; ++i) ok = name == stateName(i);
      for (std::size_t j = 0; j < p.r && !ok; ++j) ok = name == controlName(j);
      if (!ok) throw ModelError(where + " references undeclared variable '" + name + "'");
    }
  };
  checkNames(grp.T, "group T");
  for (std::size_t i = 0; i < p.n; ++i) checkNames(grp.X[i], "group X" + std::to_string(i + 1));
  for (std::size_t j = 0; j < p.r; ++j) checkNames(grp.U[j], "group U" + std::to_string(j + 1));

  const ProblemLayout layout(signatureOf(p, p.constraints.empty() ? ProblemForm::P : ProblemForm::P1));
  const std::map<std::string, Expr> atZero{{"s", Expr::constant(0.0)}};

  struct Component {
    std::string name;
    std::size_t identitySlot;
    CompiledExpr atZero;
    CompiledExpr secondDerivative;
  };
  std::vector<Component> comps;
  auto add = [&](const std::string& name, std::size_t slot, const Expr& e) {
    comps.push_back({name, slot, layout.compile(simplify(substitute(e, atZero))), layout.compile(diff(diff(e, "s"), "s"))});
  };
  add("T", layout.t(), grp.T);
  for (std::size_t i = 0; i < p.n; ++i) add("X" + std::to_string(i + 1), layout.x(i), grp.X[i]);
  for (std::size_t j = 0; j < p.r; ++j) add("U" + std::to_string(j + 1), layout.u(j), grp.U[j]);

  SampleConfig probe = cfg;
  probe.seed = cfg.seed ^ 0x9E3779B97F4A7C15ULL;
  SampleBox box(p, grp, probe, layout);
  std::vector<double> point = layout.makePoint();
  std::vector<double> scratch(box.dimension());
  for (std::size_t k = 0; k < 100; ++k) {
    box.fill(k, point, scratch);
    try {
      for (const auto& c : comps) {
        (void)c.secondDerivative(point);  // finite on the box, else DomainError
        const double sampledS = point[layout.s()];
        point[layout.s()] = 0.0;
        const double v = c.atZero(point);
        const double expected = point[c.identitySlot];
        point[layout.s()] = sampledS;
        if (std::abs(v - expected) > 1e-12 * (1.0 + std::abs(expected)))
          throw ModelError("group '" + grp.name + "' is not the identity at s = 0: component " + c.name);
      }
    } catch (const DomainError& err) {
      if (cfg.skipDomainErrors) continue;
      throw ModelError("group '" + grp.name + "' is not C2-smooth on the sampling box: " + err.what());
    }
  }
}

InvarianceReport checkInvarianceP(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg,
                                  Execution exec) {
  if (!p.constraints.empty()) throw ModelError("vector-form invariance check requires a problem without constraints");
  validateGroup(p, grp, cfg);
  const ProblemLayout layout(signatureOf(p, ProblemForm::P));
  return evaluateConditions(p, grp, cfg, layout, finiteConditions(p, grp, layout, false), exec);
}

InvarianceReport checkInvarianceP1(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg,
                                   Execution exec) {
  if (p.costCount() != 1) throw ModelError("scalar-form invariance check requires exactly one cost");
  validateGroup(p, grp, cfg);
  const ProblemLayout layout(signatureOf(p, ProblemForm::P1));
  return evaluateConditions(p, grp, cfg, layout, finiteConditions(p, grp, layout, true), exec);
}

InvarianceReport checkInfinitesimal(const ControlProblem& p, const OneParamGroup& grp, const SampleConfig& cfg,
                                    Execution exec) {
  validateGroup(p, grp, cfg);
  const ProblemForm form = p.constraints.empty() ? ProblemForm::P : ProblemForm::P1;
  const ProblemLayout layout(signatureOf(p, form));
  const Generator gen = generator(grp);
  const Expr dtau = totalTimeDerivative(gen.tau, p, grp);

  std::vector<Condition> conditions;
  for (std::size_t i = 0; i < p.n; ++i) {
    Condition c;
    c.name = "X" + std::to_string(i + 1);
    c.lhs.push_back(layout.compile(totalTimeDerivative(gen.xi[i], p, grp)));
    c.rhs = linearizedTerms(p.phi[i], p, gen, dtau, layout);
    conditions.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < p.costCount(); ++j)
    conditions.push_back({"L" + std::to_string(j + 1), {}, linearizedTerms(p.L[j], p, gen, dtau, layout)});
  for (std::size_t j = 0; j < p.constraints.size(); ++j)
    conditions.push_back({"g" + std::to_string(j + 1), {}, linearizedTerms(p.constraints[j].g, p, gen, dtau, layout)});
  return evaluateConditions(p, grp, cfg, layout, conditions, exec);
}

}  // namespace noether
