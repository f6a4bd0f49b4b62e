#include "soblab/matrix_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

namespace soblab {

namespace {

std::span<const double> asSpan(const Vec& x, std::array<double, kMaxDim>& buf) {
  for (int i = 0; i < x.size(); ++i) buf[i] = x[i];
  return {buf.data(), static_cast<std::size_t>(x.size())};
}

/// Range of an affine function c0 + g·x over the closure of the domain.
std::pair<double, double> affineRange(double c0, const Vec& g, const Domain& dom) {
  if (dom.kind() == Domain::Kind::Box) {
    double lo = c0, hi = c0;
    for (int i = 0; i < dom.dim(); ++i) {
      const double a = g[i] * dom.lo()[i], b = g[i] * dom.hi()[i];
      lo += std::min(a, b);
      hi += std::max(a, b);
    }
    return {lo, hi};
  }
  const double mid = c0 + g.dot(dom.center());
  const double amp = dom.radius() * g.norm();
  return {mid - amp, mid + amp};
}

}  // namespace

MatrixField MatrixField::identity(int n) {
  if (n < 2 || n > kMaxDim) throw DomainError("matrix field dimension must be 2..4");
  MatrixField m;
  m.kind_ = MatrixKind::Identity;
  m.n_ = n;
  return m;
}

MatrixField MatrixField::constant(Mat A) {
  if (A.size() < 2 || A.size() > kMaxDim) throw DomainError("matrix dimension must be 2..4");
  if (!A.isSymmetric(1e-12 * std::max(1.0, A.maxAbs())))
    throw DomainError("coefficient matrix must be symmetric");
  const auto ev = symEigenvalues(A);
  if (!(ev[0] > 0.0)) throw EllipticityError("constant coefficient matrix is not positive definite");
  MatrixField m;
  m.kind_ = MatrixKind::Constant;
  m.n_ = A.size();
  m.constant_ = A;
  return m;
}

MatrixField MatrixField::diagonalAffine(Vec base, Mat slopes) {
  if (base.size() != slopes.size()) throw DomainError("diagonal-affine sizes disagree");
  MatrixField m;
  m.kind_ = MatrixKind::DiagonalAffine;
  m.n_ = base.size();
  m.diagBase_ = base;
  m.diagSlopes_ = slopes;
  return m;
}

MatrixField MatrixField::scalarProfile(Expr phi, int n) {
  if (n < 2 || n > kMaxDim) throw DomainError("matrix field dimension must be 2..4");
  if (phi.maxVarIndex() >= n)
    throw DomainError("profile references coordinates beyond the dimension");
  MatrixField m;
  m.kind_ = MatrixKind::ScalarProfile;
  m.n_ = n;
  m.phi_ = phi;
  for (int i = 0; i < n; ++i) m.phiGrad_.push_back(phi.derivative(i));
  for (int i = 0; i < n; ++i) m.phiHessDiag_.push_back(m.phiGrad_[i].derivative(i));
  return m;
}

MatrixField MatrixField::custom(std::vector<std::vector<Expr>> entries) {
  const int n = static_cast<int>(entries.size());
  if (n < 2 || n > kMaxDim) throw DomainError("matrix field dimension must be 2..4");
  for (const auto& row : entries)
    if (static_cast<int>(row.size()) != n) throw DomainError("coefficient matrix must be square");
  MatrixField m;
  m.kind_ = MatrixKind::Custom;
  m.n_ = n;
  m.entries_ = std::move(entries);
  m.entryGrad_.resize(n);
  for (int i = 0; i < n; ++i) {
    m.entryGrad_[i].resize(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) m.entryGrad_[i][j].push_back(m.entries_[i][j].derivative(k));
  }
  // symmetry probe
  for (std::size_t s = 0; s < 32; ++s) {
    const Vec x = haltonPoint(s, n);
    const Mat A = m.value(x);
    if (!A.isSymmetric(1e-10 * std::max(1.0, A.maxAbs())))
      throw DomainError("custom coefficient matrix is not symmetric");
  }
  return m;
}

Mat MatrixField::value(const Vec& x) const {
  switch (kind_) {
    case MatrixKind::Identity:
      return Mat::identityMat(n_);
    case MatrixKind::Constant:
      return constant_;
    case MatrixKind::DiagonalAffine: {
      Mat A(n_);
      for (int i = 0; i < n_; ++i) {
        double v = diagBase_[i];
        for (int j = 0; j < n_; ++j) v += diagSlopes_(i, j) * x[j];
        A(i, i) = v;
      }
      return A;
    }
    case MatrixKind::ScalarProfile: {
      std::array<double, kMaxDim> buf;
      const double p = phi_.eval(asSpan(x, buf));
      Mat A(n_);
      for (int i = 0; i < n_; ++i) A(i, i) = p;
      return A;
    }
    case MatrixKind::Custom: {
      std::array<double, kMaxDim> buf;
      const auto vars = asSpan(x, buf);
      Mat A(n_);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) A(i, j) = entries_[i][j].eval(vars);
      return A;
    }
  }
  return Mat(n_);
}

Vec MatrixField::divergence(const Vec& x) const {
  switch (kind_) {
    case MatrixKind::Identity:
    case MatrixKind::Constant:
      return Vec(n_);
    case MatrixKind::DiagonalAffine: {
      Vec d(n_);
      for (int i = 0; i < n_; ++i) d[i] = diagSlopes_(i, i);
      return d;
    }
    case MatrixKind::ScalarProfile: {
      std::array<double, kMaxDim> buf;
      const auto vars = asSpan(x, buf);
      Vec d(n_);
      for (int i = 0; i < n_; ++i) d[i] = phiGrad_[i].eval(vars);
      return d;
    }
    case MatrixKind::Custom: {
      std::array<double, kMaxDim> buf;
      const auto vars = asSpan(x, buf);
      Vec d(n_);
      for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += entryGrad_[i][j][j].eval(vars);
        d[i] = s;
      }
      return d;
    }
  }
  return Vec(n_);
}

double MatrixField::divergence2(const Vec& x) const {
  switch (kind_) {
    case MatrixKind::Identity:
    case MatrixKind::Constant:
    case MatrixKind::DiagonalAffine:
      return 0.0;
    case MatrixKind::ScalarProfile: {
      std::array<double, kMaxDim> buf;
      const auto vars = asSpan(x, buf);
      double s = 0.0;
      for (int i = 0; i < n_; ++i) s += phiHessDiag_[i].eval(vars);
      return s;
    }
    case MatrixKind::Custom: {
      std::array<double, kMaxDim> buf;
      const auto vars = asSpan(x, buf);
      double s = 0.0;
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += entryGrad_[i][j][j].derivative(i).eval(vars);
      return s;
    }
  }
  return 0.0;
}

double MatrixField::applyP(const Vec& x, const Mat& hessian) const {
  return value(x).frobenius(hessian);
}

double MatrixField::aNormSq(const Vec& x, const Vec& xi) const {
  const Mat A = value(x);
  const double q = xi.dot(A.mul(xi));
  if (q < -1e-12 * std::max(1.0, xi.norm2() * A.maxAbs()))
    throw EllipticityError("negative quadratic form: coefficient matrix not positive definite");
  return std::max(q, 0.0);
}

double MatrixField::aNorm(const Vec& x, const Vec& xi) const { return std::sqrt(aNormSq(x, xi)); }

EllipticityBounds MatrixField::ellipticity(const Domain& dom, int nsamples) const {
  switch (kind_) {
    case MatrixKind::Identity:
      return {1.0, 1.0, true, "exact (identity)"};
    case MatrixKind::Constant: {
      const auto ev = symEigenvalues(constant_);
      return {ev[0], ev[n_ - 1], true, "exact (constant matrix eigenvalues)"};
    }
    case MatrixKind::DiagonalAffine: {
      double lo = kInf, hi = -kInf;
      for (int i = 0; i < n_; ++i) {
        Vec g(n_);
        for (int j = 0; j < n_; ++j) g[j] = diagSlopes_(i, j);
        const auto [a, b] = affineRange(diagBase_[i], g, dom);
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
      if (!(lo > 0.0)) throw EllipticityError("diagonal entry reaches " + std::to_string(lo));
      return {lo, hi, true, "exact (affine diagonal extremes on the closure)"};
    }
    case MatrixKind::ScalarProfile: {
      if (auto deg = phi_.polynomialDegree(); deg && *deg <= 1) {
        std::array<double, kMaxDim> buf{};
        const std::span<const double> at0(buf.data(), static_cast<std::size_t>(n_));
        Vec g(n_);
        for (int i = 0; i < n_; ++i) g[i] = phiGrad_[i].eval(at0);
        const auto [lo, hi] = affineRange(phi_.eval(at0), g, dom);
        if (!(lo > 0.0)) throw EllipticityError("profile reaches " + std::to_string(lo));
        return {lo, hi, true, "exact (affine profile extremes on the closure)"};
      }
      break;
    }
    case MatrixKind::Custom:
      break;
  }
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < static_cast<std::size_t>(nsamples); ++i) {
    const Vec x = dom.closurePoint(i);
    const auto ev = symEigenvalues(value(x));
    if (!(ev[0] > 0.0))
      throw EllipticityError("non-positive eigenvalue " + std::to_string(ev[0]) + " at " +
                             x.str());
    lo = std::min(lo, ev[0]);
    hi = std::max(hi, ev[n_ - 1]);
  }
  return {lo, hi, false,
          "sampled eigenvalue extremes, " + std::to_string(nsamples) + " quasi-random points"};
}

DivergenceBounds MatrixField::divergenceBounds(const Domain& dom, int nsamples) const {
  switch (kind_) {
    case MatrixKind::Identity:
    case MatrixKind::Constant:
      return {0.0, 0.0, true, true, "exact (constant coefficients)"};
    case MatrixKind::DiagonalAffine: {
      Vec d(n_);
      for (int i = 0; i < n_; ++i) d[i] = diagSlopes_(i, i);
      return {d.norm(), 0.0, true, true, "exact (constant divergence, affine diagonal)"};
    }
    case MatrixKind::ScalarProfile: {
      if (auto deg = phi_.polynomialDegree(); deg && *deg <= 1) {
        std::array<double, kMaxDim> buf{};
        const std::span<const double> at0(buf.data(), static_cast<std::size_t>(n_));
        Vec g(n_);
        for (int i = 0; i < n_; ++i) g[i] = phiGrad_[i].eval(at0);
        return {g.norm(), 0.0, true, true, "exact (constant gradient, affine profile)"};
      }
      break;
    }
    case MatrixKind::Custom:
      break;
  }
  double sup = 0.0, d2max = -kInf;
  for (std::size_t i = 0; i < static_cast<std::size_t>(nsamples); ++i) {
    const Vec x = dom.closurePoint(i);
    sup = std::max(sup, divergence(x).norm());
    d2max = std::max(d2max, divergence2(x));
  }
  return {sup, d2max, d2max <= 1e-12, false,
          "sampled sup, " + std::to_string(nsamples) + " quasi-random points"};
}

std::string MatrixField::describe() const {
  switch (kind_) {
    case MatrixKind::Identity:
      return "identity";
    case MatrixKind::Constant:
      return "constant matrix";
    case MatrixKind::DiagonalAffine:
      return "diagonal-affine";
    case MatrixKind::ScalarProfile:
      return "scalar-profile(" + phi_.text() + ")";
    case MatrixKind::Custom:
      return "custom matrix";
  }
  return "?";
}

OperatorConstants operatorConstants(const MatrixField& A, const Domain& dom, int nsamples) {
  const EllipticityBounds e = A.ellipticity(dom, nsamples);
  const DivergenceBounds d = A.divergenceBounds(dom, nsamples);
  OperatorConstants out;
  out.cA = e.cA;
  out.CA = e.CA;
  out.divSup = d.divSup;
  out.dA = d.divSup * d.divSup / e.cA;
  out.a2Holds = d.a2Holds;
  out.divFree = d.divSup < 1e-14;
  out.cProvenance = e.provenance;
  out.divProvenance = d.provenance;
  return out;
}

}  // namespace soblab
