#include "soblab/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "soblab/errors.hpp"

namespace soblab {

namespace {

Rule1d computeGaussLegendre(int n) {
  Rule1d r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const Rule1d& gaussLegendre(int n) {
  if (n < 1) throw DomainError("gaussLegendre: n must be positive");
  static std::mutex mu;
  static std::map<int, Rule1d> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, computeGaussLegendre(n)).first;
  return it->second;
}

Rule1d gaussLegendre01(int n) {
  Rule1d r = gaussLegendre(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
    r.weights[i] *= 0.5;
  }
  return r;
}

namespace {

double gaussOn(const std::function<double(double)>& f, double a, double b, const Rule1d& r) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

double adaptiveStep(const std::function<double(double)>& f, double a, double b, double whole,
                    double rel_tol, double abs_tol, int depth) {
  if (depth > 48) throw EvaluationError("adaptive quadrature exceeded depth budget");
  const Rule1d& g = gaussLegendre(12);
  const double mid = 0.5 * (a + b);
  const double left = gaussOn(f, a, mid, g);
  const double right = gaussOn(f, mid, b, g);
  const double err = std::abs(left + right - whole);
  if (err <= abs_tol + rel_tol * std::abs(left + right)) return left + right;
  return adaptiveStep(f, a, mid, left, rel_tol, abs_tol * 0.5, depth + 1) +
         adaptiveStep(f, mid, b, right, rel_tol, abs_tol * 0.5, depth + 1);
}

}  // namespace

double adaptiveIntegrate(const std::function<double(double)>& f, double a, double b,
                         double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  const double whole = gaussOn(f, a, b, gaussLegendre(12));
  return adaptiveStep(f, a, b, whole, rel_tol, abs_tol, 0);
}

}  // namespace soblab
