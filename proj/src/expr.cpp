#include "soblab/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace soblab {

namespace {
enum class Fun { Exp, Log, Sqrt, Sin, Cos, Abs, Sgn };
}

struct Expr::Node {
  enum Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call } kind;
  double value = 0.0;  // Const value, or the exponent for Pow
  int var = -1;
  Fun fun = Fun::Exp;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Node = Expr::Node;

NodePtr mkConst(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Const;
  n->value = v;
  return n;
}

NodePtr mkVar(int idx) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Var;
  n->var = idx;
  return n;
}

bool isConst(const NodePtr& n, double v) { return n->kind == Node::Const && n->value == v; }

NodePtr mkAdd(NodePtr a, NodePtr b) {
  if (a->kind == Node::Const && b->kind == Node::Const) return mkConst(a->value + b->value);
  if (isConst(a, 0.0)) return b;
  if (isConst(b, 0.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Node::Add;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr mkNeg(NodePtr a) {
  if (a->kind == Node::Const) return mkConst(-a->value);
  auto n = std::make_shared<Node>();
  n->kind = Node::Neg;
  n->a = std::move(a);
  return n;
}

NodePtr mkSub(NodePtr a, NodePtr b) {
  if (a->kind == Node::Const && b->kind == Node::Const) return mkConst(a->value - b->value);
  if (isConst(b, 0.0)) return a;
  if (isConst(a, 0.0)) return mkNeg(std::move(b));
  auto n = std::make_shared<Node>();
  n->kind = Node::Sub;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr mkMul(NodePtr a, NodePtr b) {
  if (a->kind == Node::Const && b->kind == Node::Const) return mkConst(a->value * b->value);
  if (isConst(a, 0.0) || isConst(b, 0.0)) return mkConst(0.0);
  if (isConst(a, 1.0)) return b;
  if (isConst(b, 1.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Node::Mul;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr mkDiv(NodePtr a, NodePtr b) {
  if (isConst(a, 0.0)) return mkConst(0.0);
  if (isConst(b, 1.0)) return a;
  if (a->kind == Node::Const && b->kind == Node::Const && b->value != 0.0)
    return mkConst(a->value / b->value);
  auto n = std::make_shared<Node>();
  n->kind = Node::Div;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr mkPow(NodePtr a, double expo) {
  if (expo == 0.0) return mkConst(1.0);
  if (expo == 1.0) return a;
  if (a->kind == Node::Const) return mkConst(std::pow(a->value, expo));
  auto n = std::make_shared<Node>();
  n->kind = Node::Pow;
  n->value = expo;
  n->a = std::move(a);
  return n;
}

NodePtr mkCall(Fun f, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Call;
  n->fun = f;
  n->a = std::move(a);
  return n;
}

double evalNode(const Node& n, std::span<const double> vars) {
  switch (n.kind) {
    case Node::Const:
      return n.value;
    case Node::Var:
      if (n.var >= static_cast<int>(vars.size()))
        throw DomainError("expression references variable x" + std::to_string(n.var + 1) +
                          " beyond the point dimension");
      return vars[n.var];
    case Node::Add:
      return evalNode(*n.a, vars) + evalNode(*n.b, vars);
    case Node::Sub:
      return evalNode(*n.a, vars) - evalNode(*n.b, vars);
    case Node::Mul:
      return evalNode(*n.a, vars) * evalNode(*n.b, vars);
    case Node::Div:
      return evalNode(*n.a, vars) / evalNode(*n.b, vars);
    case Node::Pow:
      return std::pow(evalNode(*n.a, vars), n.value);
    case Node::Neg:
      return -evalNode(*n.a, vars);
    case Node::Call: {
      const double x = evalNode(*n.a, vars);
      switch (n.fun) {
        case Fun::Exp:
          return std::exp(x);
        case Fun::Log:
          return std::log(x);
        case Fun::Sqrt:
          return std::sqrt(x);
        case Fun::Sin:
          return std::sin(x);
        case Fun::Cos:
          return std::cos(x);
        case Fun::Abs:
          return std::abs(x);
        case Fun::Sgn:
          return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
      }
      return 0.0;
    }
  }
  return 0.0;
}

NodePtr deriveNode(const NodePtr& n, int var) {
  switch (n->kind) {
    case Node::Const:
      return mkConst(0.0);
    case Node::Var:
      return mkConst(n->var == var ? 1.0 : 0.0);
    case Node::Add:
      return mkAdd(deriveNode(n->a, var), deriveNode(n->b, var));
    case Node::Sub:
      return mkSub(deriveNode(n->a, var), deriveNode(n->b, var));
    case Node::Mul:
      return mkAdd(mkMul(deriveNode(n->a, var), n->b), mkMul(n->a, deriveNode(n->b, var)));
    case Node::Div:
      return mkDiv(mkSub(mkMul(deriveNode(n->a, var), n->b), mkMul(n->a, deriveNode(n->b, var))),
                   mkPow(n->b, 2.0));
    case Node::Pow:
      return mkMul(mkMul(mkConst(n->value), mkPow(n->a, n->value - 1.0)), deriveNode(n->a, var));
    case Node::Neg:
      return mkNeg(deriveNode(n->a, var));
    case Node::Call: {
      const NodePtr da = deriveNode(n->a, var);
      switch (n->fun) {
        case Fun::Exp:
          return mkMul(mkCall(Fun::Exp, n->a), da);
        case Fun::Log:
          return mkDiv(da, n->a);
        case Fun::Sqrt:
          return mkDiv(da, mkMul(mkConst(2.0), mkCall(Fun::Sqrt, n->a)));
        case Fun::Sin:
          return mkMul(mkCall(Fun::Cos, n->a), da);
        case Fun::Cos:
          return mkNeg(mkMul(mkCall(Fun::Sin, n->a), da));
        case Fun::Abs:
          return mkMul(mkCall(Fun::Sgn, n->a), da);
        case Fun::Sgn:
          return mkConst(0.0);  // a.e.
      }
      return mkConst(0.0);
    }
  }
  return mkConst(0.0);
}

std::optional<int> degreeNode(const NodePtr& n) {
  switch (n->kind) {
    case Node::Const:
      return 0;
    case Node::Var:
      return 1;
    case Node::Add:
    case Node::Sub: {
      auto da = degreeNode(n->a), db = degreeNode(n->b);
      if (!da || !db) return std::nullopt;
      return std::max(*da, *db);
    }
    case Node::Mul: {
      auto da = degreeNode(n->a), db = degreeNode(n->b);
      if (!da || !db) return std::nullopt;
      return *da + *db;
    }
    case Node::Div: {
      auto da = degreeNode(n->a), db = degreeNode(n->b);
      if (!da || !db || *db != 0) return std::nullopt;
      return *da;
    }
    case Node::Pow: {
      auto da = degreeNode(n->a);
      if (!da) return std::nullopt;
      const double e = n->value;
      if (e >= 0 && e == std::floor(e)) return *da * static_cast<int>(e);
      if (*da == 0) return 0;
      return std::nullopt;
    }
    case Node::Neg:
      return degreeNode(n->a);
    case Node::Call: {
      auto da = degreeNode(n->a);
      if (da && *da == 0) return 0;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

int maxVarNode(const NodePtr& n) {
  switch (n->kind) {
    case Node::Const:
      return -1;
    case Node::Var:
      return n->var;
    case Node::Pow:
    case Node::Neg:
    case Node::Call:
      return maxVarNode(n->a);
    default:
      return std::max(maxVarNode(n->a), maxVarNode(n->b));
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = parseExpr();
    skipSpace();
    if (pos_ != s_.size()) throw ExprError("unexpected trailing input", pos_);
    return e;
  }

 private:
  NodePtr parseExpr() {
    NodePtr e = parseTerm();
    for (;;) {
      skipSpace();
      if (accept('+'))
        e = mkAdd(e, parseTerm());
      else if (accept('-'))
        e = mkSub(e, parseTerm());
      else
        return e;
    }
  }

  NodePtr parseTerm() {
    NodePtr e = parseUnary();
    for (;;) {
      skipSpace();
      if (accept('*'))
        e = mkMul(e, parseUnary());
      else if (accept('/'))
        e = mkDiv(e, parseUnary());
      else
        return e;
    }
  }

  NodePtr parseUnary() {
    skipSpace();
    if (accept('-')) return mkNeg(parseUnary());
    if (accept('+')) return parseUnary();
    return parsePower();
  }

  NodePtr parsePower() {
    NodePtr base = parseAtom();
    skipSpace();
    if (accept('^')) {
      const std::size_t at = pos_;
      NodePtr e = parseUnary();
      if (maxVarNode(e) >= 0) throw ExprError("exponent must be a constant", at);
      return mkPow(base, evalNode(*e, {}));
    }
    return base;
  }

  NodePtr parseAtom() {
    skipSpace();
    if (pos_ >= s_.size()) throw ExprError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parseNumber();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parseIdent();
    if (accept('(')) {
      NodePtr e = parseExpr();
      expect(')');
      return e;
    }
    throw ExprError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parseNumber() {
    const std::size_t start = pos_;
    std::size_t consumed = 0;
    double v;
    try {
      v = std::stod(s_.substr(start), &consumed);
    } catch (const std::exception&) {
      throw ExprError("malformed number", start);
    }
    pos_ = start + consumed;
    return mkConst(v);
  }

  NodePtr parseIdent() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "s") return mkVar(0);
    if (name.size() >= 2 && name[0] == 'x') {
      int idx = 0;
      bool numeric = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
          numeric = false;
          break;
        }
        idx = idx * 10 + (name[i] - '0');
      }
      if (numeric) {
        if (idx < 1 || idx > 4) throw ExprError("variable index out of range (x1..x4)", start);
        return mkVar(idx - 1);
      }
    }
    if (name == "pi") return mkConst(std::numbers::pi);
    if (name == "e") return mkConst(std::numbers::e);
    static const std::pair<const char*, Fun> fns[] = {
        {"exp", Fun::Exp}, {"log", Fun::Log}, {"sqrt", Fun::Sqrt},
        {"sin", Fun::Sin}, {"cos", Fun::Cos}, {"abs", Fun::Abs},
        {"sgn", Fun::Sgn}};
    for (const auto& [fname, fid] : fns) {
      if (name == fname) {
        skipSpace();
        expect('(');
        NodePtr arg = parseExpr();
        expect(')');
        return mkCall(fid, arg);
      }
    }
    throw ExprError("unknown identifier '" + name + "'", start);
  }

  void skipSpace() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skipSpace();
    if (!accept(c)) throw ExprError(std::string("expected '") + c + "'", pos_);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  return Expr(p.parse(), text);
}

double Expr::eval(std::span<const double> vars) const {
  if (!root_) throw DomainError("eval of empty expression");
  return evalNode(*root_, vars);
}

Expr Expr::derivative(int var) const {
  if (!root_) throw DomainError("derivative of empty expression");
  return Expr(deriveNode(root_, var), "d/dx" + std::to_string(var + 1) + "(" + text_ + ")");
}

std::optional<int> Expr::polynomialDegree() const {
  if (!root_) return std::nullopt;
  return degreeNode(root_);
}

int Expr::maxVarIndex() const { return root_ ? maxVarNode(root_) : -1; }

}  // namespace soblab
