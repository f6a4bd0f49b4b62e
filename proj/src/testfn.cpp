#include "soblab/testfn.hpp"

#include <algorithm>
#include <cmath>

namespace soblab {

namespace {

/// Radial profile jet: u = g(r) with r = |x - c|, away from r = 0.
Jet radialJet(const Vec& x, const Vec& c, double g, double dg, double d2g) {
  const int n = x.size();
  Jet out;
  const Vec d = x - c;
  const double r = d.norm();
  const Vec rhat = (1.0 / r) * d;
  out.value = g;
  out.grad = dg * rhat;
  out.hess = Mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double proj = rhat[i] * rhat[j];
      out.hess(i, j) = d2g * proj + dg / r * ((i == j ? 1.0 : 0.0) - proj);
    }
  return out;
}

/// Re and Im of (x + iy)^d with first and second complex-derivative parts.
void complexPow(double x, double y, int d, double& re, double& im) {
  re = 1.0;
  im = 0.0;
  for (int k = 0; k < d; ++k) {
    const double r2 = re * x - im * y;
    im = re * y + im * x;
    re = r2;
  }
}

}  // namespace

TestFunction TestFunction::radialPower(double alpha, Vec center, double R) {
  if (!(R > 0.0)) throw DomainError("radial-power scale must be positive");
  TestFunction f;
  f.family_ = TestFamily::RadialPower;
  f.alpha_ = alpha;
  f.center_ = center;
  f.R_ = R;
  f.dim_ = center.size();
  return f;
}

TestFunction TestFunction::quadraticRadial(double a, double b) {
  TestFunction f;
  f.family_ = TestFamily::QuadraticRadial;
  f.a_ = a;
  f.b_ = b;
  f.dim_ = 0;  // any
  return f;
}

TestFunction TestFunction::bump(int k, Vec center, double rho) {
  if (k < 2) throw DomainError("bump exponent must be >= 2 for an integrable Hessian");
  if (!(rho > 0.0)) throw DomainError("bump radius must be positive");
  TestFunction f;
  f.family_ = TestFamily::Bump;
  f.k_ = k;
  f.center_ = center;
  f.rho_ = rho;
  f.dim_ = center.size();
  return f;
}

TestFunction TestFunction::signedPower1d(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("signed power requires 0 < eps < 1/2");
  TestFunction f;
  f.family_ = TestFamily::SignedPower1d;
  f.eps_ = eps;
  f.dim_ = 0;  // any
  return f;
}

TestFunction TestFunction::harmonicPoly(int degree, int part) {
  if (degree < 1) throw DomainError("harmonic polynomial degree must be >= 1");
  if (part != 0 && part != 1) throw DomainError("harmonic polynomial part must be 0 or 1");
  TestFunction f;
  f.family_ = TestFamily::HarmonicPoly;
  f.degree_ = degree;
  f.part_ = part;
  f.dim_ = 2;
  return f;
}

TestFunction TestFunction::custom(Expr expr, int dim) {
  if (dim < 2 || dim > kMaxDim) throw DomainError("custom function dimension must be 2..4");
  if (expr.maxVarIndex() >= dim)
    throw DomainError("expression references coordinates beyond the dimension");
  TestFunction f;
  f.family_ = TestFamily::Custom;
  f.f_ = expr;
  f.dim_ = dim;
  f.df_.reserve(dim);
  for (int i = 0; i < dim; ++i) f.df_.push_back(expr.derivative(i));
  f.d2f_.resize(dim);
  for (int i = 0; i < dim; ++i) {
    f.d2f_[i].reserve(dim);
    for (int j = 0; j < dim; ++j) f.d2f_[i].push_back(f.df_[i].derivative(j));
  }
  return f;
}

double TestFunction::value(const Vec& x) const {
  switch (family_) {
    case TestFamily::RadialPower: {
      const double r = (x - center_).norm();
      return std::pow(1.0 - r / R_, alpha_);
    }
    case TestFamily::QuadraticRadial:
      return a_ - b_ * x.norm2();
    case TestFamily::Bump: {
      const double s = (x - center_).norm2() / (rho_ * rho_);
      return s >= 1.0 ? 0.0 : std::pow(1.0 - s, k_);
    }
    case TestFamily::SignedPower1d: {
      const double t = x[0];
      return (t >= 0 ? 1.0 : -1.0) * std::pow(std::abs(t), 0.5 + eps_) + 1.0;
    }
    case TestFamily::HarmonicPoly: {
      double re, im;
      complexPow(x[0], x[1], degree_, re, im);
      return part_ == 0 ? re : im;
    }
    case TestFamily::Custom: {
      std::array<double, kMaxDim> v{};
      for (int i = 0; i < x.size(); ++i) v[i] = x[i];
      return f_.eval(std::span<const double>(v.data(), x.size()));
    }
  }
  return 0.0;
}

Jet TestFunction::jet(const Vec& x) const {
  const int n = x.size();
  switch (family_) {
    case TestFamily::RadialPower: {
      const double r = (x - center_).norm();
      if (r == 0.0) throw SingularPointError("radial power is not differentiable at the center");
      const double t = 1.0 - r / R_;
      const double g = std::pow(t, alpha_);
      const double dg = -alpha_ / R_ * std::pow(t, alpha_ - 1.0);
      const double d2g = alpha_ * (alpha_ - 1.0) / (R_ * R_) * std::pow(t, alpha_ - 2.0);
      return radialJet(x, center_, g, dg, d2g);
    }
    case TestFamily::QuadraticRadial: {
      Jet out;
      out.value = a_ - b_ * x.norm2();
      out.grad = -2.0 * b_ * x;
      out.hess = Mat(n);
      for (int i = 0; i < n; ++i) out.hess(i, i) = -2.0 * b_;
      return out;
    }
    case TestFamily::Bump: {
      Jet out;
      out.grad = Vec(n);
      out.hess = Mat(n);
      const Vec d = x - center_;
      const double s = d.norm2() / (rho_ * rho_);
      if (s >= 1.0) return out;  // identically zero outside the support
      const double p1 = std::pow(1.0 - s, k_ - 1);
      const double p2 = k_ >= 2 ? std::pow(1.0 - s, k_ - 2) : 0.0;
      out.value = std::pow(1.0 - s, k_);
      out.grad = (-2.0 * k_ / (rho_ * rho_) * p1) * d;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = 4.0 * k_ * (k_ - 1) / std::pow(rho_, 4) * p2 * d[i] * d[j];
          if (i == j) v += -2.0 * k_ / (rho_ * rho_) * p1;
          out.hess(i, j) = v;
        }
      return out;
    }
    case TestFamily::SignedPower1d: {
      const double t = x[0];
      if (t == 0.0) throw SingularPointError("signed power is not twice differentiable at x1=0");
      const double q = 0.5 + eps_;
      Jet out;
      out.value = (t > 0 ? 1.0 : -1.0) * std::pow(std::abs(t), q) + 1.0;
      out.grad = Vec(n);
      out.grad[0] = q * std::pow(std::abs(t), q - 1.0);
      out.hess = Mat(n);
      out.hess(0, 0) = q * (q - 1.0) * std::pow(std::abs(t), q - 2.0) * (t > 0 ? 1.0 : -1.0);
      return out;
    }
    case TestFamily::HarmonicPoly: {
      if (n != 2) throw DomainError("harmonic polynomials are two-dimensional");
      double re0, im0, re1 = 0, im1 = 0, re2 = 0, im2 = 0;
      complexPow(x[0], x[1], degree_, re0, im0);
      complexPow(x[0], x[1], degree_ - 1, re1, im1);
      if (degree_ >= 2) complexPow(x[0], x[1], degree_ - 2, re2, im2);
      const double c1 = degree_;
      const double c2 = degree_ * (degree_ - 1.0);
      Jet out;
      out.grad = Vec(2);
      out.hess = Mat(2);
      if (part_ == 0) {
        out.value = re0;
        out.grad = Vec{c1 * re1, -c1 * im1};
        out.hess(0, 0) = c2 * re2;
        out.hess(0, 1) = out.hess(1, 0) = -c2 * im2;
        out.hess(1, 1) = -c2 * re2;
      } else {
        out.value = im0;
        out.grad = Vec{c1 * im1, c1 * re1};
        out.hess(0, 0) = c2 * im2;
        out.hess(0, 1) = out.hess(1, 0) = c2 * re2;
        out.hess(1, 1) = -c2 * im2;
      }
      return out;
    }
    case TestFamily::Custom: {
      std::array<double, kMaxDim> v{};
      for (int i = 0; i < n; ++i) v[i] = x[i];
      const std::span<const double> vars(v.data(), static_cast<std::size_t>(n));
      Jet out;
      out.value = f_.eval(vars);
      out.grad = Vec(n);
      out.hess = Mat(n);
      for (int i = 0; i < n; ++i) out.grad[i] = df_[i].eval(vars);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.hess(i, j) = d2f_[i][j].eval(vars);
      return out;
    }
  }
  return {};
}

Jet TestFunction::fdJet(const Vec& x, double step) const {
  const int n = x.size();
  Jet out;
  out.value = value(x);
  out.grad = Vec(n);
  out.hess = Mat(n);
  const double f0 = out.value;
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const double fp = value(xp), fm = value(xm);
    out.grad[i] = (fp - fm) / (2.0 * step);
    out.hess(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Vec xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += step;
      xpp[j] += step;
      xpm[i] += step;
      xpm[j] -= step;
      xmp[i] -= step;
      xmp[j] += step;
      xmm[i] -= step;
      xmm[j] -= step;
      const double v =
          (value(xpp) - value(xpm) - value(xmp) + value(xmm)) / (4.0 * step * step);
      out.hess(i, j) = out.hess(j, i) = v;
    }
  return out;
}

Jet TestFunction::fdJet4(const Vec& x, double step) const {
  const Jet a = fdJet(x, step);
  const Jet b = fdJet(x, 0.5 * step);
  Jet out;
  out.value = a.value;
  const int n = x.size();
  out.grad = Vec(n);
  out.hess = Mat(n);
  for (int i = 0; i < n; ++i) out.grad[i] = (4.0 * b.grad[i] - a.grad[i]) / 3.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.hess(i, j) = (4.0 * b.hess(i, j) - a.hess(i, j)) / 3.0;
  return out;
}

double TestFunction::smoothnessClearance(const Vec& x) const {
  switch (family_) {
    case TestFamily::RadialPower:
      return (x - center_).norm();
    case TestFamily::Bump:
      return std::abs((x - center_).norm() - rho_);
    case TestFamily::SignedPower1d:
      return std::abs(x[0]);
    default:
      return kInf;
  }
}

ValueRange TestFunction::range(const Domain& dom) const {
  switch (family_) {
    case TestFamily::RadialPower: {
      // over a concentric ball: monotone in the radius
      if (dom.kind() == Domain::Kind::Ball && (dom.center() - center_).norm() < 1e-14 &&
          dom.radius() <= R_) {
        const double at_rim = std::pow(1.0 - dom.radius() / R_, alpha_);  // may be inf
        if (alpha_ < 0.0) return {1.0, at_rim, true};
        return {at_rim, 1.0, true};
      }
      break;
    }
    case TestFamily::QuadraticRadial: {
      double r2min = 0.0, r2max = 0.0;
      if (dom.kind() == Domain::Kind::Ball) {
        const double d = dom.center().norm();
        r2max = std::pow(d + dom.radius(), 2);
        r2min = d > dom.radius() ? std::pow(d - dom.radius(), 2) : 0.0;
      } else {
        for (int i = 0; i < dom.dim(); ++i) {
          const double lo = dom.lo()[i], hi = dom.hi()[i];
          r2max += std::max(lo * lo, hi * hi);
          if (lo > 0)
            r2min += lo * lo;
          else if (hi < 0)
            r2min += hi * hi;
        }
      }
      if (b_ >= 0) return {a_ - b_ * r2max, a_ - b_ * r2min, true};
      return {a_ - b_ * r2min, a_ - b_ * r2max, true};
    }
    case TestFamily::Bump:
      return {0.0, dom.contains(center_) ? 1.0 : 0.0, true};
    case TestFamily::SignedPower1d: {
      if (dom.kind() == Domain::Kind::Box) {
        auto v = [this](double t) {
          return (t >= 0 ? 1.0 : -1.0) * std::pow(std::abs(t), 0.5 + eps_) + 1.0;
        };
        return {v(dom.lo()[0]), v(dom.hi()[0]), true};
      }
      break;
    }
    default:
      break;
  }
  // generic sampled range with a small safety margin
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < 4096; ++i) {
    const Vec x = dom.closurePoint(i);
    double v;
    try {
      v = value(x);
    } catch (const SingularPointError&) {
      continue;
    }
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double pad = 0.05 * (hi - lo) + 1e-12;
  return {lo - pad, hi + pad, false};
}

std::string TestFunction::describe() const {
  char buf[128];
  switch (family_) {
    case TestFamily::RadialPower:
      std::snprintf(buf, sizeof buf, "radial-power(alpha=%g, R=%g)", alpha_, R_);
      return buf;
    case TestFamily::QuadraticRadial:
      std::snprintf(buf, sizeof buf, "quadratic-radial(%g - %g|x|^2)", a_, b_);
      return buf;
    case TestFamily::Bump:
      std::snprintf(buf, sizeof buf, "bump(k=%d, rho=%g)", k_, rho_);
      return buf;
    case TestFamily::SignedPower1d:
      std::snprintf(buf, sizeof buf, "signed-power-1d(eps=%g)", eps_);
      return buf;
    case TestFamily::HarmonicPoly:
      std::snprintf(buf, sizeof buf, "harmonic-poly(degree=%d, %s)", degree_,
                    part_ == 0 ? "Re" : "Im");
      return buf;
    case TestFamily::Custom:
      return "custom(" + f_.text() + ")";
  }
  return "?";
}

bool restrictedIndicator(const TestFunction& u, double B, const Vec& x) {
  const double v = u.value(x);
  return v > 0.0 && v < B;
}

}  // namespace soblab
