#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "soblab/geometry.hpp"
#include "soblab/matrix_field.hpp"
#include "soblab/reports.hpp"
#include "soblab/testfn.hpp"
#include "soblab/weights.hpp"

namespace soblab {

struct Tolerances {
  double smooth = 1e-6;
  double singular = 1e-3;
  double trace = 0.05;  // shell-average trace comparisons
};

struct QuadSpec {
  std::vector<int> levels{3, 4, 5};
  double grading = 0.0;  // 0 = auto
};

/// One configured verification problem: domain, weight triple, test
/// function, coefficient matrix and the quadrature/tolerance policy.
struct Experiment {
  Experiment(Domain d, WeightTriple w, TestFunction fn, MatrixField a, QuadSpec q = {},
             Tolerances t = {}, bool restr = false)
      : domain(std::move(d)),
        weight(std::move(w)),
        u(std::move(fn)),
        A(std::move(a)),
        quad(std::move(q)),
        tol(t),
        restricted(restr) {}

  Domain domain;
  WeightTriple weight;
  TestFunction u;
  MatrixField A;
  QuadSpec quad;
  Tolerances tol;
  bool restricted = false;
  int constantSamples = 10000;
  std::uint64_t seed = 20260801u;

  /// Exponent of the leading boundary singularity of the energy integrand
  /// when it is predictable from the family parameters.
  std::optional<double> predictedBoundaryExponent() const;
  /// Resolved grading exponent for the interior rules.
  double resolveGrading() const;
  /// Residual tolerance: singular tolerance when a negative boundary
  /// exponent is predicted, smooth tolerance otherwise.
  double residualTolerance() const;
};

/// Interior and boundary integrals of every term at one level.
struct LevelTerms {
  double I2 = 0.0, JP = 0.0, Jdiv = 0.0, Jabs = 0.0, GH = 0.0;
  double opialMixed = 0.0, opialGrad2h = 0.0;
  double hessHtilde = 0.0, hessLocal = 0.0;
  double PHtAbs = 0.0;  // int |P(Htilde(u))| via the pointwise composition
  double theta = 0.0;
  long excluded = 0;  // nodes with u outside (0, B)
  double residual = 0.0, relResidual = 0.0;
};

LevelTerms computeLevelTerms(const Experiment& ex, int level);

/// Boundary term at one level: the outer-normal flux of A grad(Htilde(u)),
/// evaluated through H(u) grad u restricted to {u in (0,B)}.
double boundaryTerm(const Experiment& ex, int level);

IdentityReport verifyIdentity(const Experiment& ex);

/// The two energy inequalities plus the trace-type bound, from a converged
/// identity report.
std::vector<InequalityReport> verifyInequalities(const Experiment& ex, const IdentityReport& id);

/// Dirichlet/sign simplification: boundary term sign, divergence term sign,
/// and the clean bound I^2 <= int |Pu||H(u)|.
std::vector<InequalityReport> verifySignSimplification(const Experiment& ex,
                                                       const IdentityReport& id);

/// Opial-type bounds with the Poincare constant and the weight-scale constant.
std::vector<InequalityReport> verifyOpial(const Experiment& ex, const IdentityReport& id);

/// The chained bound int G_H <= Gamma * I^2 and, when 0 < kappa < 1, the
/// simplified energy inequality with the 1/(1-kappa) factor.
std::vector<InequalityReport> verifySimplified(const Experiment& ex, const IdentityReport& id);

/// Integral chain-rule-type upper bound for the composition.
std::vector<InequalityReport> verifyChainRuleBound(const Experiment& ex,
                                                   const IdentityReport& id);

/// Metafune-Spina identity on compactly supported data; g defaults to the
/// identity map (then g* = 1).
IdentityReport verifyMetafuneSpina(const Domain& dom, const TestFunction& u, double p,
                                   const std::optional<Expr>& g, const QuadSpec& quad,
                                   const Tolerances& tol);

struct TraceConstancyReport {
  bool applicable = true;
  bool holds = false;
  bool infinite = false;  // averages diverge: the common trace is B (or infinity)
  double T = 0.0;
  double spread = 0.0;
  std::vector<LevelRow> perPoint;
  std::vector<std::string> messages;
};

TraceConstancyReport verifyTraceConstancy(const Experiment& ex, int boundaryPoints,
                                          const std::vector<double>& radii);

struct TangentialReport {
  bool applicable = true;
  bool holds = false;
  double maxTangential = 0.0;
  double maxBoundaryValue = 0.0;
  std::vector<std::string> messages;
};

/// For v vanishing on the boundary, the boundary gradient is parallel to the
/// outer normal: max tangential component over boundary nodes.
TangentialReport verifyTangentialGradient(const TestFunction& v, const Domain& dom, int level,
                                          double tol = 1e-8);

struct PointwiseReport {
  bool holds = false;
  double maxRelError = 0.0;
  int points = 0;
  std::vector<std::string> messages;
};

/// P(Htilde(u)) = h(u)|grad u|_A^2 + H(u) P u at random interior points; the
/// left side is an independent finite-difference Hessian of the composition.
PointwiseReport verifyPointwiseIdentity(const Experiment& ex, int npoints, double tol);

}  // namespace soblab
