#pragma once

#include <functional>
#include <vector>

#include "soblab/expr.hpp"
#include "soblab/reports.hpp"
#include "soblab/testfn.hpp"

namespace soblab {

/// One trigonometric mode a cos(k t) + b sin(k t).
struct Mode {
  int k = 0;
  double a = 0.0;
  double b = 0.0;
};

/// Square-integrable boundary data on the unit circle. Trigonometric
/// polynomials evaluate exactly; closed-form and sampled data are projected
/// onto a finite mode basis for harmonic extension.
class BoundaryData {
 public:
  static BoundaryData trigPolynomial(std::vector<Mode> modes);
  static BoundaryData closedForm(Expr g);  // g(theta), variable s
  static BoundaryData fromFunction(std::function<double(double)> g);

  double eval(double theta) const;
  double deriv(double theta) const;

  bool isTrig() const { return trig_; }
  const std::vector<Mode>& modes() const { return modes_; }

 private:
  BoundaryData() = default;
  void project();  // fills modes_ from fn_ by periodic trapezoid quadrature
  bool trig_ = true;
  std::vector<Mode> modes_;
  std::function<double(double)> fn_;
  std::function<double(double)> dfn_;  // optional exact derivative
};

/// Double-boundary Douglas energy of g: the quadratic form against
/// 1/sin^2((xi-eta)/2) scaled by 1/(8 pi). The diagonal is the continuous
/// extension 4 g'(xi)^2.
double douglasEnergy(const BoundaryData& g, int level);

/// Harmonic extension of g evaluated inside the unit disk.
double poissonExtend(const BoundaryData& g, const Vec& x);

/// Value and gradient of the harmonic extension (mode sum).
Jet poissonExtendJet(const BoundaryData& g, const Vec& x);

/// Interior Dirichlet energy of the harmonic extension on the unit disk.
double dirichletEnergyOfExtension(const BoundaryData& g, int level);

/// Sobolev-Bregman double boundary form with the Feller kernel
/// 1/(pi |z-w|^2) of the unit disk: (p/2) * double integral of
/// (u^{<p-1>}(z)-u^{<p-1>}(w)) (u(z)-u(w)) gamma(z,w).
double fellerForm(const BoundaryData& u, double p, int level);

/// Direct boundary term: the outer-normal flux of grad(u^p) on the circle,
/// with signed powers for sign-changing u and even p.
double thetaDirect(const TestFunction& u, double p, int level);

struct ThetaRepReport {
  bool converged = false;
  bool harmonic = false;
  double theta_direct = 0.0;
  double representation = 0.0;
  double sobolev_bregman = 0.0;
  double volume_term = 0.0;
  double rel_gap = 0.0;
  std::vector<LevelRow> levels;
  std::vector<std::string> messages;
};

/// Cross-check of the Douglas-type representation of the boundary term:
/// direct flux versus Sobolev-Bregman form plus the Poisson volume term.
/// A gap on non-harmonic data is reported as a finding, not a failure.
ThetaRepReport thetaRepresentationCheck(const TestFunction& u, double p,
                                        const std::vector<int>& levels);

}  // namespace soblab
