#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soblab/expr.hpp"
#include "soblab/geometry.hpp"
#include "soblab/linalg.hpp"
#include "soblab/testfn.hpp"

namespace soblab {

enum class MatrixKind { Identity, Constant, DiagonalAffine, ScalarProfile, Custom };

struct EllipticityBounds {
  double cA = 1.0, CA = 1.0;
  bool exact = true;
  std::string provenance;
};

struct DivergenceBounds {
  double divSup = 0.0;   // sup of |div A| over the closure (exact or sampled)
  double div2Max = 0.0;  // sup of the repeated divergence
  bool a2Holds = true;   // repeated divergence <= 0 everywhere sampled
  bool exact = true;
  std::string provenance;
};

/// Symmetric coefficient matrix A(x) of the non-divergence operator
/// P u = sum_ij a_ij d^2u/dx_i dx_j, with analytic first and second partials.
/// Immutable after construction; safe to share.
class MatrixField {
 public:
  static MatrixField identity(int n);
  static MatrixField constant(Mat A);
  /// Diagonal matrix with affine entries a_ii(x) = base_i + slopes.row(i)·x.
  static MatrixField diagonalAffine(Vec base, Mat slopes);
  /// phi(x) * Id with a closed-form profile.
  static MatrixField scalarProfile(Expr phi, int n);
  static MatrixField custom(std::vector<std::vector<Expr>> entries);

  int dim() const { return n_; }
  MatrixKind kind() const { return kind_; }

  Mat value(const Vec& x) const;
  /// (div A)_i = sum_j d a_ij / d x_j.
  Vec divergence(const Vec& x) const;
  /// sum_ij d^2 a_ij / dx_i dx_j.
  double divergence2(const Vec& x) const;

  /// Frobenius pairing of A(x) with a Hessian: the operator action.
  double applyP(const Vec& x, const Mat& hessian) const;
  double applyP(const Vec& x, const Jet& jet) const { return applyP(x, jet.hess); }

  /// sqrt(xi^T A(x) xi); throws EllipticityError on a negative form.
  double aNorm(const Vec& x, const Vec& xi) const;
  double aNormSq(const Vec& x, const Vec& xi) const;

  /// Extremes of the eigenvalue field over the closure (exact closed forms
  /// for constant/affine kinds, dense quasi-random sampling otherwise).
  EllipticityBounds ellipticity(const Domain& dom, int nsamples = 10000) const;
  DivergenceBounds divergenceBounds(const Domain& dom, int nsamples = 10000) const;

  std::string describe() const;

 private:
  MatrixField() = default;

  MatrixKind kind_ = MatrixKind::Identity;
  int n_ = 2;
  Mat constant_;
  Vec diagBase_;
  Mat diagSlopes_;
  Expr phi_;
  std::vector<Expr> phiGrad_;
  std::vector<Expr> phiHessDiag_;
  std::vector<std::vector<Expr>> entries_;
  std::vector<std::vector<std::vector<Expr>>> entryGrad_;  // [i][j][k] = d a_ij / dx_k
};

/// Composite operator constants used by the inequality checks.
struct OperatorConstants {
  double cA = 1.0, CA = 1.0, dA = 0.0, divSup = 0.0;
  bool a2Holds = true;
  bool divFree = true;
  std::string cProvenance, divProvenance;
};

OperatorConstants operatorConstants(const MatrixField& A, const Domain& dom,
                                    int nsamples = 10000);

}  // namespace soblab
