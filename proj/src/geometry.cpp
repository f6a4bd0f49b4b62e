#include "soblab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "soblab/errors.hpp"
#include "soblab/gauss.hpp"
#include "soblab/parallel.hpp"

namespace soblab {

namespace {
constexpr double kPi = std::numbers::pi;

int nodes1d(int level) { return 1 << level; }

/// Symmetric polynomial endpoint-grading map on [0,1]: the normalized
/// incomplete Beta(q,q) integral. Its derivative (t(1-t))^{q-1}/B(q,q) is a
/// polynomial, so Gauss rules keep exact total weight.
struct BetaMap {
  explicit BetaMap(int q_) : q(q_) {
    // B(q,q) = (q-1)!^2 / (2q-1)!
    double num = 1.0, den = 1.0;
    for (int i = 1; i <= q - 1; ++i) num *= i;
    for (int i = 1; i <= 2 * q - 1; ++i) den *= i;
    norm = num * num / den;
  }
  double map(double t) const {
    if (q == 1) return t;
    // integrate tau^{q-1}(1-tau)^{q-1} by binomial expansion
    double acc = 0.0, binom = 1.0;
    for (int m = 0; m <= q - 1; ++m) {
      acc += binom * std::pow(t, q + m) / (q + m);
      binom *= -(static_cast<double>(q - 1 - m)) / (m + 1);
    }
    return acc / norm;
  }
  double deriv(double t) const {
    if (q == 1) return 1.0;
    return std::pow(t * (1.0 - t), q - 1) / norm;
  }
  int q;
  double norm;
};

}  // namespace

Domain Domain::ball(Vec center, double radius) {
  if (center.size() < 2 || center.size() > kMaxDim)
    throw DomainError("ball dimension must be 2..4");
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  Domain d;
  d.kind_ = Kind::Ball;
  d.n_ = center.size();
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain Domain::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw DomainError("box corners must share a dimension");
  if (lo.size() < 2 || lo.size() > kMaxDim) throw DomainError("box dimension must be 2..4");
  for (int i = 0; i < lo.size(); ++i)
    if (!(hi[i] > lo[i])) throw DomainError("box must have positive widths");
  Domain d;
  d.kind_ = Kind::Box;
  d.n_ = lo.size();
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

double Domain::volume() const {
  if (kind_ == Kind::Box) {
    double v = 1.0;
    for (int i = 0; i < n_; ++i) v *= hi_[i] - lo_[i];
    return v;
  }
  switch (n_) {
    case 2:
      return kPi * radius_ * radius_;
    case 3:
      return 4.0 / 3.0 * kPi * radius_ * radius_ * radius_;
    default:
      return 0.5 * kPi * kPi * std::pow(radius_, 4);  // n = 4
  }
}

double Domain::surfaceArea() const {
  if (kind_ == Kind::Box) {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      double face = 1.0;
      for (int j = 0; j < n_; ++j)
        if (j != i) face *= hi_[j] - lo_[j];
      s += 2.0 * face;
    }
    return s;
  }
  switch (n_) {
    case 2:
      return 2.0 * kPi * radius_;
    case 3:
      return 4.0 * kPi * radius_ * radius_;
    default:
      return 2.0 * kPi * kPi * std::pow(radius_, 3);
  }
}

bool Domain::contains(const Vec& x, double shrink) const {
  if (kind_ == Kind::Ball) return (x - center_).norm() < radius_ - shrink;
  for (int i = 0; i < n_; ++i)
    if (x[i] <= lo_[i] + shrink || x[i] >= hi_[i] - shrink) return false;
  return true;
}

double Domain::boundaryDistance(const Vec& x) const {
  if (kind_ == Kind::Ball) return radius_ - (x - center_).norm();
  double d = kInf;
  for (int i = 0; i < n_; ++i) d = std::min({d, x[i] - lo_[i], hi_[i] - x[i]});
  return d;
}

double Domain::diameter() const {
  if (kind_ == Kind::Ball) return 2.0 * radius_;
  Vec w = hi_ - lo_;
  return w.norm();
}

std::string Domain::str() const {
  if (kind_ == Kind::Ball)
    return "ball(center=" + center_.str() + ", R=" + std::to_string(radius_) + ")";
  return "box(lo=" + lo_.str() + ", hi=" + hi_.str() + ")";
}

Vec haltonPoint(std::size_t index, int dim) {
  static const int bases[kMaxDim] = {2, 3, 5, 7};
  Vec p(dim);
  for (int d = 0; d < dim; ++d) {
    double f = 1.0, r = 0.0;
    std::size_t i = index + 1;
    while (i > 0) {
      f /= bases[d];
      r += f * (i % bases[d]);
      i /= bases[d];
    }
    p[d] = r;
  }
  return p;
}

Vec Domain::closurePoint(std::size_t index) const {
  // every 5th point is projected to the boundary
  const bool on_boundary = (index % 5) == 4;
  Vec u = haltonPoint(index, n_);
  if (kind_ == Kind::Box) {
    Vec x(n_);
    for (int i = 0; i < n_; ++i) x[i] = lo_[i] + u[i] * (hi_[i] - lo_[i]);
    if (on_boundary) {
      const int axis = static_cast<int>(index / 5) % n_;
      const bool high = (index / (5 * n_)) % 2 == 0;
      x[axis] = high ? hi_[axis] : lo_[axis];
    }
    return x;
  }
  // ball: direction from the trailing coordinates, radius from the first
  Vec dir(n_);
  if (n_ == 2) {
    const double th = 2.0 * kPi * u[1];
    dir = Vec{std::cos(th), std::sin(th)};
  } else if (n_ == 3) {
    const double z = 2.0 * u[1] - 1.0, ph = 2.0 * kPi * u[2];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    dir = Vec{s * std::cos(ph), s * std::sin(ph), z};
  } else {
    for (int i = 0; i < n_; ++i) dir[i] = u[(i + 1) % n_] - 0.5;
    if (dir.norm() < 1e-12) dir[0] = 1.0;
    dir *= 1.0 / dir.norm();
  }
  const double r = on_boundary ? radius_ : radius_ * std::pow(u[0], 1.0 / n_);
  return center_ + r * dir;
}

double QuadratureRule::totalWeight() const {
  return pairwiseSum(weights.data(), weights.size());
}

namespace {

QuadratureRule boxInterior(const Domain& dom, int level, double grading) {
  const int n = dom.dim();
  const int q = std::clamp(static_cast<int>(std::lround(grading)), 1, 8);
  const int m = nodes1d(level);
  const Rule1d g = gaussLegendre01(m);
  const BetaMap bm(q);

  std::vector<double> t(m), wt(m);
  for (int i = 0; i < m; ++i) {
    t[i] = bm.map(g.nodes[i]);
    wt[i] = g.weights[i] * bm.deriv(g.nodes[i]);
  }

  QuadratureRule rule;
  rule.level = level;
  rule.grading = q;
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= m;
  rule.nodes.reserve(total);
  rule.weights.reserve(total);

  std::vector<int> idx(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Vec x(n);
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      const double width = dom.hi()[d] - dom.lo()[d];
      x[d] = dom.lo()[d] + width * t[idx[d]];
      w *= width * wt[idx[d]];
    }
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    for (int d = 0; d < n; ++d) {
      if (++idx[d] < m) break;
      idx[d] = 0;
    }
  }
  return rule;
}

/// Angular nodes and weights on the unit sphere S^{n-1} (n = 2 or 3).
void sphereRule(int n, int level, std::vector<Vec>& dirs, std::vector<double>& wts) {
  if (n == 2) {
    const int m = 4 * nodes1d(level);
    dirs.reserve(m);
    wts.assign(m, 2.0 * kPi / m);
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * kPi * (j + 0.5) / m;
      dirs.push_back(Vec{std::cos(th), std::sin(th)});
    }
    return;
  }
  if (n == 3) {
    const int mz = 2 * nodes1d(level);
    const int mp = 2 * mz;
    const Rule1d gz = gaussLegendre(mz);
    dirs.reserve(static_cast<std::size_t>(mz) * mp);
    wts.reserve(static_cast<std::size_t>(mz) * mp);
    for (int k = 0; k < mz; ++k) {
      const double z = gz.nodes[k];
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int l = 0; l < mp; ++l) {
        const double ph = 2.0 * kPi * (l + 0.5) / mp;
        dirs.push_back(Vec{s * std::cos(ph), s * std::sin(ph), z});
        wts.push_back(gz.weights[k] * 2.0 * kPi / mp);
      }
    }
    return;
  }
  throw DomainError("ball quadrature supports dimensions 2 and 3");
}

QuadratureRule ballInterior(const Domain& dom, int level, double grading) {
  const int n = dom.dim();
  const double q = std::max(1.0, grading);
  const double R = dom.radius();
  const int mr = nodes1d(level);
  const Rule1d gr = gaussLegendre01(mr);

  std::vector<Vec> dirs;
  std::vector<double> dirw;
  sphereRule(n, level, dirs, dirw);

  QuadratureRule rule;
  rule.level = level;
  rule.grading = q;
  rule.nodes.reserve(static_cast<std::size_t>(mr) * dirs.size());
  rule.weights.reserve(static_cast<std::size_t>(mr) * dirs.size());
  for (int i = 0; i < mr; ++i) {
    const double t = gr.nodes[i];
    const double rho = 1.0 - std::pow(1.0 - t, q);          // graded radius in [0,1)
    const double drho = q * std::pow(1.0 - t, q - 1.0);     // Jacobian of the map
    const double wr = gr.weights[i] * std::pow(R, n) * std::pow(rho, n - 1) * drho;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      rule.nodes.push_back(dom.center() + (R * rho) * dirs[j]);
      rule.weights.push_back(wr * dirw[j]);
    }
  }
  return rule;
}

}  // namespace

QuadratureRule interiorRule(const Domain& dom, int level, double grading) {
  if (level < 1) throw DomainError("quadrature level must be >= 1");
  if (grading < 1.0) throw DomainError("grading exponent must be >= 1");
  return dom.kind() == Domain::Kind::Box ? boxInterior(dom, level, grading)
                                         : ballInterior(dom, level, grading);
}

QuadratureRule boundaryRule(const Domain& dom, int level) {
  if (level < 1) throw DomainError("quadrature level must be >= 1");
  QuadratureRule rule;
  rule.level = level;
  const int n = dom.dim();
  if (dom.kind() == Domain::Kind::Ball) {
    std::vector<Vec> dirs;
    std::vector<double> wts;
    sphereRule(n, level, dirs, wts);
    const double scale = std::pow(dom.radius(), n - 1);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      rule.nodes.push_back(dom.center() + dom.radius() * dirs[j]);
      rule.normals.push_back(dirs[j]);
      rule.weights.push_back(scale * wts[j]);
    }
    return rule;
  }
  // box: composite tensor Gauss on each open face; edges and corners carry no
  // nodes (Gauss nodes are strictly interior to the face)
  const int m = nodes1d(level);
  const Rule1d g = gaussLegendre01(m);
  for (int axis = 0; axis < n; ++axis) {
    for (int side = 0; side < 2; ++side) {
      std::vector<int> other;
      for (int d = 0; d < n; ++d)
        if (d != axis) other.push_back(d);
      const int fdim = n - 1;
      std::size_t total = 1;
      for (int d = 0; d < fdim; ++d) total *= m;
      std::vector<int> idx(fdim, 0);
      Vec normal(n);
      normal[axis] = side == 1 ? 1.0 : -1.0;
      for (std::size_t k = 0; k < total; ++k) {
        Vec x(n);
        x[axis] = side == 1 ? dom.hi()[axis] : dom.lo()[axis];
        double w = 1.0;
        for (int d = 0; d < fdim; ++d) {
          const int ax = other[d];
          const double width = dom.hi()[ax] - dom.lo()[ax];
          x[ax] = dom.lo()[ax] + width * g.nodes[idx[d]];
          w *= width * g.weights[idx[d]];
        }
        rule.nodes.push_back(x);
        rule.normals.push_back(normal);
        rule.weights.push_back(w);
        for (int d = 0; d < fdim; ++d) {
          if (++idx[d] < m) break;
          idx[d] = 0;
        }
      }
    }
  }
  return rule;
}

double integrateIndexed(const std::function<double(std::size_t, const Vec&)>& f,
                        const QuadratureRule& rule) {
  const std::size_t n = rule.size();
  std::vector<double> terms(n);
  parallelFor(n, [&](std::size_t i) { terms[i] = f(i, rule.nodes[i]) * rule.weights[i]; });
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(terms[i]))
      throw NonFiniteIntegrandError(i, rule.nodes[i].str());
  }
  return pairwiseSum(terms.data(), n);
}

double integrate(const std::function<double(const Vec&)>& f, const QuadratureRule& rule) {
  return integrateIndexed([&f](std::size_t, const Vec& x) { return f(x); }, rule);
}

PoincareBound poincareConstant(const Domain& dom) {
  if (dom.kind() == Domain::Kind::Ball)
    return {dom.radius(), "upper bound, radial slicing, ball R=" + std::to_string(dom.radius())};
  double wmin = kInf;
  for (int i = 0; i < dom.dim(); ++i) wmin = std::min(wmin, dom.hi()[i] - dom.lo()[i]);
  return {0.5 * wmin, "upper bound, slicing, box min width " + std::to_string(wmin)};
}

std::vector<double> shellAverages(const std::function<double(const Vec&)>& f, const Domain& dom,
                                  const Vec& x, const std::vector<double>& radii,
                                  int resolution) {
  if (resolution < 4) throw DomainError("shell average resolution must be >= 4");
  const int n = dom.dim();
  std::vector<Vec> dirs;
  std::vector<double> dirw;
  if (n == 2) {
    const int m = 2 * resolution;
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * kPi * (j + 0.5) / m;
      dirs.push_back(Vec{std::cos(th), std::sin(th)});
      dirw.push_back(2.0 * kPi / m);
    }
  } else if (n == 3) {
    const Rule1d gz = gaussLegendre(resolution);
    const int mp = 2 * resolution;
    for (int k = 0; k < resolution; ++k) {
      const double z = gz.nodes[k];
      const double sz = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int l = 0; l < mp; ++l) {
        const double ph = 2.0 * kPi * (l + 0.5) / mp;
        dirs.push_back(Vec{sz * std::cos(ph), sz * std::sin(ph), z});
        dirw.push_back(gz.weights[k] * 2.0 * kPi / mp);
      }
    }
  } else {
    throw DomainError("shell averages support dimensions 2 and 3");
  }
  const Rule1d gr = gaussLegendre01(resolution);

  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("shell radius must be positive");
    double mass = 0.0, volume = 0.0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
        const double rho = r * gr.nodes[i];
        const Vec y = x + rho * dirs[j];
        if (!dom.contains(y, 1e-14 * dom.diameter())) continue;
        const double w = gr.weights[i] * r * std::pow(rho, n - 1) * dirw[j];
        mass += w * f(y);
        volume += w;
      }
    }
    if (volume <= 0.0) throw DomainError("shell average: empty intersection with the domain");
    out.push_back(mass / volume);
  }
  return out;
}

}  // namespace soblab
