#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "soblab/errors.hpp"

namespace soblab {

/// Error while parsing a closed-form expression.
class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

/// A closed-form expression in the variables x1..x4 (or `s` for one-variable
/// weight profiles, which aliases x1). Supports +, -, *, /, ^ with constant
/// exponent, the functions exp/log/sqrt/sin/cos/abs, and the constants pi, e.
/// Expressions carry exact symbolic first derivatives, so coefficient fields
/// and custom test functions get analytic jets.
class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& text);

  bool valid() const { return root_ != nullptr; }
  double eval(std::span<const double> vars) const;
  double eval1(double s) const { return eval(std::span<const double>(&s, 1)); }

  Expr derivative(int var) const;

  /// Degree as a polynomial in x1..xn, or nullopt if not polynomial.
  std::optional<int> polynomialDegree() const;

  /// Largest variable slot referenced, or -1 for a constant expression.
  int maxVarIndex() const;

  const std::string& text() const { return text_; }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> root, std::string text)
      : root_(std::move(root)), text_(std::move(text)) {}
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace soblab
