#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

#include "soblab/errors.hpp"

namespace soblab {

/// Largest spatial dimension supported by the built-in domains.
inline constexpr int kMaxDim = 4;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Small fixed-capacity vector for points, directions and gradients.
class Vec {
 public:
  Vec() : n_(0), a_{} {}
  explicit Vec(int n, double fill = 0.0) : n_(n), a_{} {
    checkDim(n);
    for (int i = 0; i < n; ++i) a_[i] = fill;
  }
  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())), a_{} {
    checkDim(n_);
    int i = 0;
    for (double v : xs) a_[i++] = v;
  }

  int size() const { return n_; }
  double operator[](int i) const { return a_[i]; }
  double& operator[](int i) { return a_[i]; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += a_[i] * o.a_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Vec& operator*=(double c) {
    for (int i = 0; i < n_; ++i) a_[i] *= c;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double c, Vec a) { return a *= c; }
  friend Vec operator*(Vec a, double c) { return a *= c; }

  static Vec unit(int n, int axis) {
    Vec e(n);
    e[axis] = 1.0;
    return e;
  }

  std::string str() const;

 private:
  static void checkDim(int n) {
    if (n < 0 || n > kMaxDim) throw DomainError("vector dimension out of range");
  }
  int n_;
  std::array<double, kMaxDim> a_;
};

/// Small dense square matrix (dimension <= kMaxDim).
class Mat {
 public:
  Mat() : n_(0), a_{} {}
  explicit Mat(int n, double fill = 0.0) : n_(n), a_{} {
    if (n < 0 || n > kMaxDim) throw DomainError("matrix dimension out of range");
    for (int i = 0; i < n * n; ++i) a_[i] = fill;
  }

  static Mat identityMat(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }
  double operator()(int i, int j) const { return a_[i * n_ + j]; }
  double& operator()(int i, int j) { return a_[i * n_ + j]; }

  Vec mul(const Vec& x) const {
    Vec y(n_);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  /// Frobenius pairing sum_ij a_ij b_ij.
  double frobenius(const Mat& b) const {
    double s = 0.0;
    for (int i = 0; i < n_ * n_; ++i) s += a_[i] * b.a_[i];
    return s;
  }

  double frobeniusNorm() const { return std::sqrt(frobenius(*this)); }

  double maxAbs() const {
    double m = 0.0;
    for (int i = 0; i < n_ * n_; ++i) m = std::max(m, std::abs(a_[i]));
    return m;
  }

  bool isSymmetric(double tol) const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

  Mat& operator+=(const Mat& o) {
    for (int i = 0; i < n_ * n_; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Mat& operator*=(double c) {
    for (int i = 0; i < n_ * n_; ++i) a_[i] *= c;
    return *this;
  }
  friend Mat operator*(double c, Mat a) { return a *= c; }
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }

  static Mat outer(const Vec& a, const Vec& b) {
    Mat m(a.size());
    for (int i = 0; i < a.size(); ++i)
      for (int j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
  }

 private:
  int n_;
  std::array<double, kMaxDim * kMaxDim> a_;
};

/// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi sweeps).
std::array<double, kMaxDim> symEigenvalues(const Mat& m);

/// Deterministic pairwise summation; independent of how the terms were produced.
double pairwiseSum(const double* a, std::size_t n);

}  // namespace soblab
