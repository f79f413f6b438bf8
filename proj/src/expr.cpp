#include "noether/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cctype>

namespace noether {

namespace {

const Node& zeroNode() {
  static const Node zero{};
  return zero;
}

std::string printNode(const Node& n);

double checkedResult(double v, const Node& n) {
  if (!std::isfinite(v)) throw DomainError("non-finite result", printNode(n));
  return v;
}

double applyUnary(UnaryOp op, double a, const Node& n) {
  switch (op) {
    case UnaryOp::Neg: return -a;
    case UnaryOp::Sin: return std::sin(a);
    case UnaryOp::Cos: return std::cos(a);
    case UnaryOp::Tan: return checkedResult(std::tan(a), n);
    case UnaryOp::Atan: return std::atan(a);
    case UnaryOp::Exp: return checkedResult(std::exp(a), n);
    case UnaryOp::Ln:
      if (!(a > 0.0)) throw DomainError("logarithm of non-positive value", printNode(n));
      return std::log(a);
    case UnaryOp::Sqrt:
      if (a < 0.0) throw DomainError("square root of negative value", printNode(n));
      return std::sqrt(a);
  }
  return 0.0;
}

bool isInteger(double v) { return std::isfinite(v) && std::trunc(v) == v; }

double applyBinary(BinaryOp op, double a, double b, const Node& n) {
  switch (op) {
    case BinaryOp::Add: return checkedResult(a + b, n);
    case BinaryOp::Sub: return checkedResult(a - b, n);
    case BinaryOp::Mul: return checkedResult(a * b, n);
    case BinaryOp::Div:
      if (b == 0.0) throw DomainError("division by zero", printNode(n));
      return checkedResult(a / b, n);
    case BinaryOp::Pow:
      if (!isInteger(b) && !(a > 0.0))
        throw DomainError("non-integer power of non-positive base", printNode(n));
      if (a == 0.0 && b < 0.0) throw DomainError("division by zero", printNode(n));
      return checkedResult(std::pow(a, b), n);
  }
  return 0.0;
}

constexpr std::array<std::pair<std::string_view, UnaryOp>, 7> kFunctions{{
    {"sin", UnaryOp::Sin},
    {"cos", UnaryOp::Cos},
    {"tan", UnaryOp::Tan},
    {"atan", UnaryOp::Atan},
    {"exp", UnaryOp::Exp},
    {"ln", UnaryOp::Ln},
    {"sqrt", UnaryOp::Sqrt},
}};

std::string_view functionName(UnaryOp op) {
  for (const auto& [name, f] : kFunctions)
    if (f == op) return name;
  return "-";
}

// ---------------------------------------------------------------------------
// printing

std::string formatNumber(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Constant: return n.value < 0 ? 3 : 5;
    case Node::Kind::Variable: return 5;
    case Node::Kind::Unary: return n.unaryOp == UnaryOp::Neg ? 3 : 5;
    case Node::Kind::Binary:
      switch (n.binaryOp) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
  }
  return 5;
}

std::string wrap(const std::string& s) { return "(" + s + ")"; }

std::string printNode(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Constant: return formatNumber(n.value);
    case Node::Kind::Variable: return n.name;
    case Node::Kind::Unary: {
      const Node& a = n.lhs.node();
      if (n.unaryOp != UnaryOp::Neg) return std::string(functionName(n.unaryOp)) + wrap(printNode(a));
      std::string inner = printNode(a);
      return "-" + (precedence(a) == 5 ? inner : wrap(inner));
    }
    case Node::Kind::Binary: {
      const Node& l = n.lhs.node();
      const Node& r = n.rhs.node();
      const int p = precedence(n);
      std::string ls = printNode(l);
      std::string rs = printNode(r);
      if (n.binaryOp == BinaryOp::Pow) {
        if (precedence(l) <= 4) ls = wrap(ls);
        if (precedence(r) < 4) rs = wrap(rs);
        return ls + "^" + rs;
      }
      // Negations print as operands only when they lead a sum.
      const bool leftNeg = precedence(l) == 3;
      if (precedence(l) < p || (leftNeg && p != 1)) ls = wrap(ls);
      if (precedence(r) <= p || precedence(r) == 3) rs = wrap(rs);
      switch (n.binaryOp) {
        case BinaryOp::Add: return ls + " + " + rs;
        case BinaryOp::Sub: return ls + " - " + rs;
        case BinaryOp::Mul: return ls + "*" + rs;
        case BinaryOp::Div: return ls + "/" + rs;
        case BinaryOp::Pow: break;
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// parsing

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e = expr();
    skipSpace();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_); }

  void skipSpace() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skipSpace();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = Expr::binary(BinaryOp::Add, e, term());
      else if (accept('-')) e = Expr::binary(BinaryOp::Sub, e, term());
      else return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*')) e = Expr::binary(BinaryOp::Mul, e, factor());
      else if (accept('/')) e = Expr::binary(BinaryOp::Div, e, factor());
      else return e;
    }
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) return Expr::binary(BinaryOp::Pow, b, factor());
    return b;
  }

  Expr base() {
    skipSpace();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::unary(UnaryOp::Neg, base());
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      std::string name(src_.substr(start, pos_ - start));
      const std::size_t afterName = pos_;
      skipSpace();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        for (const auto& [fname, op] : kFunctions) {
          if (fname == name) {
            ++pos_;
            Expr arg = expr();
            if (!accept(')')) fail("expected ')'");
            return Expr::unary(op, arg);
          }
        }
        throw ParseError("unknown function '" + name + "'", start);
      }
      pos_ = afterName;
      return Expr::variable(std::move(name));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// simplification

Expr simplifyOnce(const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Constant:
    case Node::Kind::Variable: return e;
    case Node::Kind::Unary: {
      Expr a = simplifyOnce(n.lhs);
      if (a.isConstant()) {
        try {
          return Expr::constant(applyUnary(n.unaryOp, a.node().value, n));
        } catch (const DomainError&) {
        }
      }
      if (n.unaryOp == UnaryOp::Neg && a.node().kind == Node::Kind::Unary && a.node().unaryOp == UnaryOp::Neg)
        return a.node().lhs;
      return Expr::unary(n.unaryOp, a);
    }
    case Node::Kind::Binary: break;
  }

  Expr a = simplifyOnce(n.lhs);
  Expr b = simplifyOnce(n.rhs);
  if (a.isConstant() && b.isConstant()) {
    try {
      return Expr::constant(applyBinary(n.binaryOp, a.node().value, b.node().value, n));
    } catch (const DomainError&) {
    }
  }
  auto isNeg = [](const Expr& x) { return x.node().kind == Node::Kind::Unary && x.node().unaryOp == UnaryOp::Neg; };
  switch (n.binaryOp) {
    case BinaryOp::Add:
      if (a.isConstant(0.0)) return b;
      if (b.isConstant(0.0)) return a;
      if (isNeg(b)) return Expr::binary(BinaryOp::Sub, a, b.node().lhs);
      break;
    case BinaryOp::Sub:
      if (b.isConstant(0.0)) return a;
      if (a.isConstant(0.0)) return Expr::unary(UnaryOp::Neg, b);
      if (isNeg(b)) return Expr::binary(BinaryOp::Add, a, b.node().lhs);
      break;
    case BinaryOp::Mul:
      if (a.isConstant(0.0) || b.isConstant(0.0)) return Expr::constant(0.0);
      if (a.isConstant(1.0)) return b;
      if (b.isConstant(1.0)) return a;
      if (a.isConstant(-1.0)) return Expr::unary(UnaryOp::Neg, b);
      if (b.isConstant(-1.0)) return Expr::unary(UnaryOp::Neg, a);
      // Coefficients move to the front: e*c -> c*e, e*(c*f) -> (c*e)*f.
      if (b.isConstant() && !a.isConstant()) return Expr::binary(BinaryOp::Mul, b, a);
      if (b.node().kind == Node::Kind::Binary && b.node().binaryOp == BinaryOp::Mul && b.node().lhs.isConstant() &&
          !a.isConstant())
        return Expr::binary(BinaryOp::Mul, Expr::binary(BinaryOp::Mul, b.node().lhs, a), b.node().rhs);
      if (a.isConstant() && b.node().kind == Node::Kind::Binary && b.node().binaryOp == BinaryOp::Mul &&
          b.node().lhs.isConstant())
        return Expr::binary(BinaryOp::Mul, Expr::constant(a.node().value * b.node().lhs.node().value), b.node().rhs);
      break;
    case BinaryOp::Div:
      if (b.isConstant(1.0)) return a;
      if (a.isConstant(0.0) && !b.isConstant(0.0)) return Expr::constant(0.0);
      break;
    case BinaryOp::Pow:
      if (b.isConstant(0.0)) return Expr::constant(1.0);
      if (b.isConstant(1.0)) return a;
      break;
  }
  return Expr::binary(n.binaryOp, a, b);
}

void collectVariables(const Node& n, std::set<std::string>& out) {
  switch (n.kind) {
    case Node::Kind::Constant: return;
    case Node::Kind::Variable: out.insert(n.name); return;
    case Node::Kind::Unary: collectVariables(n.lhs.node(), out); return;
    case Node::Kind::Binary:
      collectVariables(n.lhs.node(), out);
      collectVariables(n.rhs.node(), out);
      return;
  }
}

Expr diffRaw(const Expr& e, const std::string& v) {
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Constant: return Expr::constant(0.0);
    case Node::Kind::Variable: return Expr::constant(n.name == v ? 1.0 : 0.0);
    case Node::Kind::Unary: {
      const Expr& a = n.lhs;
      Expr da = diffRaw(a, v);
      switch (n.unaryOp) {
        case UnaryOp::Neg: return -da;
        case UnaryOp::Sin: return da * Expr::unary(UnaryOp::Cos, a);
        case UnaryOp::Cos: return -(da * Expr::unary(UnaryOp::Sin, a));
        case UnaryOp::Tan: return da / pow(Expr::unary(UnaryOp::Cos, a), Expr::constant(2.0));
        case UnaryOp::Atan: return da / (Expr::constant(1.0) + pow(a, Expr::constant(2.0)));
        case UnaryOp::Exp: return da * e;
        case UnaryOp::Ln: return da / a;
        case UnaryOp::Sqrt: return da / (Expr::constant(2.0) * e);
      }
      break;
    }
    case Node::Kind::Binary: {
      const Expr& a = n.lhs;
      const Expr& b = n.rhs;
      switch (n.binaryOp) {
        case BinaryOp::Add: return diffRaw(a, v) + diffRaw(b, v);
        case BinaryOp::Sub: return diffRaw(a, v) - diffRaw(b, v);
        case BinaryOp::Mul: return diffRaw(a, v) * b + a * diffRaw(b, v);
        case BinaryOp::Div:
          return (diffRaw(a, v) * b - a * diffRaw(b, v)) / pow(b, Expr::constant(2.0));
        case BinaryOp::Pow: {
          if (!dependsOn(b, v)) {
            // Integer exponents stay valid for any base.
            return b * pow(a, b - Expr::constant(1.0)) * diffRaw(a, v);
          }
          if (!dependsOn(a, v)) return diffRaw(b, v) * Expr::unary(UnaryOp::Ln, a) * e;
          return e * (diffRaw(b, v) * Expr::unary(UnaryOp::Ln, a) + b * diffRaw(a, v) / a);
        }
      }
    }
  }
  return Expr::constant(0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr

const Node& Expr::node() const noexcept { return node_ ? *node_ : zeroNode(); }

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Unary;
  n->unaryOp = op;
  n->lhs = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->binaryOp = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

bool Expr::isConstant() const noexcept { return node().kind == Node::Kind::Constant; }
bool Expr::isConstant(double value) const noexcept { return isConstant() && node().value == value; }
bool Expr::isVariable() const noexcept { return node().kind == Node::Kind::Variable; }

bool treeEqual(const Expr& a, const Expr& b) {
  const Node& x = a.node();
  const Node& y = b.node();
  if (&x == &y) return true;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Node::Kind::Constant: return x.value == y.value || (std::isnan(x.value) && std::isnan(y.value));
    case Node::Kind::Variable: return x.name == y.name;
    case Node::Kind::Unary: return x.unaryOp == y.unaryOp && treeEqual(x.lhs, y.lhs);
    case Node::Kind::Binary:
      return x.binaryOp == y.binaryOp && treeEqual(x.lhs, y.lhs) && treeEqual(x.rhs, y.rhs);
  }
  return false;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(UnaryOp::Neg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(BinaryOp::Pow, base, exponent); }

double Env::at(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw UnboundVariable(name);
  return it->second;
}

bool isFunctionName(std::string_view name) {
  for (const auto& [fname, op] : kFunctions)
    if (fname == name) return true;
  return false;
}

Expr parse(std::string_view source) { return Parser(source).run(); }

std::string print(const Expr& e) { return printNode(e.node()); }

double eval(const Expr& e, const Env& env) {
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Constant: return n.value;
    case Node::Kind::Variable: return env.at(n.name);
    case Node::Kind::Unary: return applyUnary(n.unaryOp, eval(n.lhs, env), n);
    case Node::Kind::Binary: {
      const double a = eval(n.lhs, env);
      const double b = eval(n.rhs, env);
      return applyBinary(n.binaryOp, a, b, n);
    }
  }
  return 0.0;
}

Expr diff(const Expr& e, const std::string& var) { return simplify(diffRaw(e, var)); }

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  if (bindings.empty()) return e;
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Constant: return e;
    case Node::Kind::Variable: {
      auto it = bindings.find(n.name);
      return it == bindings.end() ? e : it->second;
    }
    case Node::Kind::Unary: return Expr::unary(n.unaryOp, substitute(n.lhs, bindings));
    case Node::Kind::Binary:
      return Expr::binary(n.binaryOp, substitute(n.lhs, bindings), substitute(n.rhs, bindings));
  }
  return e;
}

Expr simplify(const Expr& e) {
  Expr cur = e;
  // Each pass only shrinks or reorders; the bound is generous.
  for (int pass = 0; pass < 64; ++pass) {
    Expr next = simplifyOnce(cur);
    if (treeEqual(next, cur)) return next;
    cur = std::move(next);
  }
  return cur;
}

std::set<std::string> freeVariables(const Expr& e) {
  std::set<std::string> out;
  collectVariables(e.node(), out);
  return out;
}

bool dependsOn(const Expr& e, const std::string& var) {
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Constant: return false;
    case Node::Kind::Variable: return n.name == var;
    case Node::Kind::Unary: return dependsOn(n.lhs, var);
    case Node::Kind::Binary: return dependsOn(n.lhs, var) || dependsOn(n.rhs, var);
  }
  return false;
}

// ---------------------------------------------------------------------------
// VarLayout / CompiledExpr

VarLayout::VarLayout(std::vector<std::string> names) {
  for (auto& name : names) add(name);
}

std::size_t VarLayout::add(const std::string& name) {
  auto it = slots_.find(name);
  if (it != slots_.end()) return it->second;
  names_.push_back(name);
  slots_.emplace(name, names_.size() - 1);
  return names_.size() - 1;
}

std::size_t VarLayout::index(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw UnboundVariable(name);
  return it->second;
}

CompiledExpr::CompiledExpr(const Expr& e, const VarLayout& layout) : source_(e) {
  emit(source_, layout);
  std::size_t depth = 0;
  for (const auto& ins : code_) {
    if (ins.op == OpCode::Const || ins.op == OpCode::Load) ++depth;
    else if (ins.op >= OpCode::Add) --depth;
    maxDepth_ = std::max(maxDepth_, depth);
  }
}

void CompiledExpr::emit(const Expr& e, const VarLayout& layout) {
  const Node& n = e.node();
  switch (n.kind) {
    case Node::Kind::Constant: code_.push_back({OpCode::Const, 0, n.value, &n}); return;
    case Node::Kind::Variable: code_.push_back({OpCode::Load, layout.index(n.name), 0.0, &n}); return;
    case Node::Kind::Unary:
      emit(n.lhs, layout);
      code_.push_back({static_cast<OpCode>(static_cast<int>(OpCode::Neg) + static_cast<int>(n.unaryOp)), 0, 0.0, &n});
      return;
    case Node::Kind::Binary:
      emit(n.lhs, layout);
      emit(n.rhs, layout);
      code_.push_back({static_cast<OpCode>(static_cast<int>(OpCode::Add) + static_cast<int>(n.binaryOp)), 0, 0.0, &n});
      return;
  }
}

double CompiledExpr::operator()(std::span<const double> slots) const {
  if (code_.empty()) return 0.0;
  std::array<double, 64> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (maxDepth_ > small.size()) {
    large.resize(maxDepth_);
    stack = large.data();
  }
  std::size_t top = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case OpCode::Const: stack[top++] = ins.value; break;
      case OpCode::Load: stack[top++] = slots[ins.slot]; break;
      case OpCode::Neg:
      case OpCode::Sin:
      case OpCode::Cos:
      case OpCode::Tan:
      case OpCode::Atan:
      case OpCode::Exp:
      case OpCode::Ln:
      case OpCode::Sqrt:
        stack[top - 1] = applyUnary(ins.node->unaryOp, stack[top - 1], *ins.node);
        break;
      default: {
        const double b = stack[--top];
        stack[top - 1] = applyBinary(ins.node->binaryOp, stack[top - 1], b, *ins.node);
      }
    }
  }
  return stack[0];
}

}  // namespace noether
