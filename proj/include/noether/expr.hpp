#pragma once
//
// Minimal symbolic expression core: an immutable tree over named real
// variables with parsing, printing, evaluation, differentiation,
// substitution and a light value-preserving simplifier.
//
// Grammar accepted by parse():
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?
//   base   := number | name | name '(' expr ')' | '(' expr ')' | '-' base
// Functions: sin cos tan atan exp ln sqrt.
//

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noether/error.hpp"

namespace noether {

enum class UnaryOp { Neg, Sin, Cos, Tan, Atan, Exp, Ln, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;

/// Shared immutable expression tree. Copying is cheap (shared ownership).
class Expr {
public:
  Expr() = default;  // the constant 0

  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr unary(UnaryOp op, Expr arg);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  const Node& node() const noexcept;

  bool isConstant() const noexcept;
  bool isConstant(double value) const noexcept;
  bool isVariable() const noexcept;

  /// Structural (tree) equality; not a symbolic identity test.
  friend bool treeEqual(const Expr& a, const Expr& b);

private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  enum class Kind { Constant, Variable, Unary, Binary };
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string name;
  UnaryOp unaryOp = UnaryOp::Neg;
  BinaryOp binaryOp = BinaryOp::Add;
  Expr lhs;  // operand of unary ops, left operand of binary ops
  Expr rhs;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);

/// Variable bindings. Looking up an unbound name throws UnboundVariable.
class Env {
public:
  Env() = default;
  Env(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  void set(const std::string& name, double value) { values_[name] = value; }
  double at(const std::string& name) const;
  bool contains(const std::string& name) const { return values_.count(name) != 0; }
  const std::map<std::string, double>& values() const noexcept { return values_; }

private:
  std::map<std::string, double> values_;
};

Expr parse(std::string_view source);
std::string print(const Expr& e);

double eval(const Expr& e, const Env& env);

/// Exact symbolic partial derivative, lightly simplified.
Expr diff(const Expr& e, const std::string& var);

/// Simultaneous substitution of variables by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

/// Constant folding and 0/1 identities, iterated to a fixed point.
Expr simplify(const Expr& e);

std::set<std::string> freeVariables(const Expr& e);
bool dependsOn(const Expr& e, const std::string& var);

bool isFunctionName(std::string_view name);

/// Flat slot table mapping variable names to indices of a value vector.
class VarLayout {
public:
  VarLayout() = default;
  explicit VarLayout(std::vector<std::string> names);

  std::size_t add(const std::string& name);
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  /// Throws UnboundVariable for unknown names.
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const { return slots_.count(name) != 0; }

private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> slots_;
};

/// Postfix program compiled against a VarLayout. Evaluates bit-identically
/// to eval() on the tree and reports the same domain errors.
class CompiledExpr {
public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const VarLayout& layout);

  double operator()(std::span<const double> slots) const;
  const Expr& source() const noexcept { return source_; }

private:
  enum class OpCode : unsigned char {
    Const, Load, Neg, Sin, Cos, Tan, Atan, Exp, Ln, Sqrt, Add, Sub, Mul, Div, Pow
  };
  struct Instr {
    OpCode op;
    std::size_t slot;
    double value;
    const Node* node;  // owned by source_, for error messages
  };
  void emit(const Expr& e, const VarLayout& layout);

  Expr source_;
  std::vector<Instr> code_;
  std::size_t maxDepth_ = 0;
};

}  // namespace noether
