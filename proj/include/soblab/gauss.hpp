#pragma once

#include <functional>
#include <vector>

namespace soblab {

struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on the Legendre recurrence).
const Rule1d& gaussLegendre(int n);

/// Gauss-Legendre rule mapped to [0, 1].
Rule1d gaussLegendre01(int n);

/// Adaptive 1D quadrature of f on [a, b] by recursive bisection with an
/// embedded Gauss error estimate. Throws EvaluationError past the depth budget.
double adaptiveIntegrate(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-10, double abs_tol = 1e-14);

}  // namespace soblab
