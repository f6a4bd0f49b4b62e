#include "soblab/linalg.hpp"

#include <algorithm>
#include <cstdio>

namespace soblab {

std::string Vec::str() const {
  std::string out = "(";
  char buf[40];
  for (int i = 0; i < n_; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", a_[i]);
    out += buf;
    if (i + 1 < n_) out += ", ";
  }
  return out + ")";
}

std::array<double, kMaxDim> symEigenvalues(const Mat& input) {
  const int n = input.size();
  Mat a = input;
  // Cyclic Jacobi rotations; plenty for n <= 4.
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::array<double, kMaxDim> ev{};
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.begin() + n);
  return ev;
}

double pairwiseSum(const double* a, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwiseSum(a, half) + pairwiseSum(a + half, n - half);
}

}  // namespace soblab
