#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soblab/expr.hpp"
#include "soblab/geometry.hpp"
#include "soblab/linalg.hpp"

namespace soblab {

/// Value, gradient and Hessian of a test function at a point.
struct Jet {
  double value = 0.0;
  Vec grad;
  Mat hess;
  double laplacian() const {
    double s = 0.0;
    for (int i = 0; i < hess.size(); ++i) s += hess(i, i);
    return s;
  }
};

struct ValueRange {
  double lo = 0.0, hi = 0.0;
  bool exact = true;
};

enum class TestFamily {
  RadialPower,     // (1 - |x-c|/R)^alpha on a ball
  QuadraticRadial, // a - b|x|^2
  Bump,            // (1 - |x-c|^2/rho^2)^k inside the support ball, 0 outside
  SignedPower1d,   // sgn(x1)|x1|^{1/2+eps} + 1
  HarmonicPoly,    // Re/Im (x1 + i x2)^d, dimension 2
  Custom           // closed-form expression with symbolic partials
};

/// Closed-form test function with an exact jet. Evaluation throws
/// SingularPointError at points where the closed form is not differentiable
/// (ball center for radial powers, the hyperplane x1 = 0 for signed powers).
class TestFunction {
 public:
  static TestFunction radialPower(double alpha, Vec center, double R = 1.0);
  static TestFunction quadraticRadial(double a, double b);
  static TestFunction bump(int k, Vec center, double rho);
  static TestFunction signedPower1d(double eps);
  static TestFunction harmonicPoly(int degree, int part);  // part: 0 = Re, 1 = Im
  static TestFunction custom(Expr f, int dim);

  double value(const Vec& x) const;
  Jet jet(const Vec& x) const;

  /// Central-difference gradient and Hessian (independent oracle for jet()).
  Jet fdJet(const Vec& x, double step) const;

  /// Fourth-order finite-difference jet by Richardson extrapolation of fdJet.
  Jet fdJet4(const Vec& x, double step) const;

  /// Distance from x to the nearest point where the closed form loses
  /// smoothness (support sphere of a bump, singular center, x1 = 0 plane).
  /// Infinity for globally smooth families.
  double smoothnessClearance(const Vec& x) const;

  ValueRange range(const Domain& dom) const;

  TestFamily family() const { return family_; }
  double radialAlpha() const { return alpha_; }
  std::string describe() const;

 private:
  TestFamily family_ = TestFamily::QuadraticRadial;
  double alpha_ = 0.0, a_ = 0.0, b_ = 0.0, eps_ = 0.0, rho_ = 1.0, R_ = 1.0;
  int k_ = 2, degree_ = 1, part_ = 0, dim_ = 2;
  Vec center_;
  Expr f_;
  std::vector<Expr> df_;
  std::vector<std::vector<Expr>> d2f_;
};

/// True iff u(x) lies strictly inside (0, B); exact from the closed form.
bool restrictedIndicator(const TestFunction& u, double B, const Vec& x);

}  // namespace soblab
