#pragma once
// Test-only helpers: random expressions/environments and independent
// finite-difference oracles. Nothing here calls the symbolic differentiator.

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "noether/aircraft.hpp"
#include "noether/expr.hpp"

namespace noether::testing {

inline Expr randomExpr(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars) {
  std::uniform_int_distribution<int> pick(0, 99);
  const int roll = pick(rng);
  if (depth <= 0 || roll < 25) {
    if (roll % 3 == 0) {
      std::uniform_real_distribution<double> c(-2.0, 2.0);
      return Expr::constant(std::round(c(rng) * 4.0) / 4.0);
    }
    std::uniform_int_distribution<std::size_t> v(0, vars.size() - 1);
    return Expr::variable(vars[v(rng)]);
  }
  if (roll < 55) {
    static const UnaryOp ops[] = {UnaryOp::Neg, UnaryOp::Sin, UnaryOp::Cos, UnaryOp::Tan,
                                  UnaryOp::Atan, UnaryOp::Exp, UnaryOp::Ln, UnaryOp::Sqrt};
    std::uniform_int_distribution<int> op(0, 7);
    return Expr::unary(ops[op(rng)], randomExpr(rng, depth - 1, vars));
  }
  static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow};
  std::uniform_int_distribution<int> op(0, 4);
  const BinaryOp bop = ops[op(rng)];
  if (bop == BinaryOp::Pow) {
    // Mix integer and fractional exponents, constant and variable.
    std::uniform_int_distribution<int> kind(0, 2);
    Expr exponent = kind(rng) == 0 ? Expr::constant(2.0)
                   : kind(rng) == 1 ? Expr::constant(0.5)
                                    : randomExpr(rng, depth - 2, vars);
    return pow(randomExpr(rng, depth - 1, vars), exponent);
  }
  return Expr::binary(bop, randomExpr(rng, depth - 1, vars), randomExpr(rng, depth - 1, vars));
}

inline Env randomEnv(std::mt19937_64& rng, const std::vector<std::string>& vars, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Env env;
  for (const auto& v : vars) env.set(v, u(rng));
  return env;
}

inline std::optional<double> tryEval(const Expr& e, const Env& env) {
  try {
    return eval(e, env);
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Central difference of e in `var` with step h; nullopt on domain errors.
inline std::optional<double> centralDifference(const Expr& e, Env env, const std::string& var, double h) {
  const double x0 = env.at(var);
  env.set(var, x0 + h);
  auto fp = tryEval(e, env);
  env.set(var, x0 - h);
  auto fm = tryEval(e, env);
  if (!fp || !fm) return std::nullopt;
  return (*fp - *fm) / (2.0 * h);
}

inline double relativeError(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

/// The aircraft scaling group with the altitude-rate exponent changed to 3.
inline OneParamGroup corruptedScalingGroup() {
  OneParamGroup g = aircraft::scalingGroup();
  g.name = "corrupted scaling";
  g.X[3] = parse("exp(3*s)*x4");
  return g;
}

/// psi1 x1 + 2 psi2 x2 + psi3 x3 + 2 psi4 x4, written out by hand.
inline double handWrittenScalingLaw(const Env& env) {
  return env.at("psi1") * env.at("x1") + 2.0 * env.at("psi2") * env.at("x2") + env.at("psi3") * env.at("x3") +
         2.0 * env.at("psi4") * env.at("x4");
}

}  // namespace noether::testing
