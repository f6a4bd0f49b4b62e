#pragma once

#include <functional>
#include <string>
#include <vector>

#include "soblab/linalg.hpp"

namespace soblab {

/// Model domain: a ball or an axis-aligned box, dimension 2..4.
/// Both have Lipschitz boundary with an outer normal defined away from the
/// box edges (which carry no quadrature nodes).
class Domain {
 public:
  enum class Kind { Ball, Box };

  static Domain ball(Vec center, double radius);
  static Domain unitDisk() { return ball(Vec{0.0, 0.0}, 1.0); }
  static Domain box(Vec lo, Vec hi);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  double volume() const;
  double surfaceArea() const;
  bool contains(const Vec& x, double shrink = 0.0) const;  // strict interior when shrink > 0
  double boundaryDistance(const Vec& x) const;             // signed: > 0 inside
  double diameter() const;

  /// Deterministic quasi-random point of the closure; a fixed fraction of the
  /// sequence lies exactly on the boundary so suprema see the closure.
  Vec closurePoint(std::size_t index) const;

  std::string str() const;

 private:
  Kind kind_ = Kind::Ball;
  int n_ = 2;
  Vec center_;
  double radius_ = 1.0;
  Vec lo_, hi_;
};

/// Nodes and positive weights; boundary rules also carry unit outer normals.
struct QuadratureRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;
  std::vector<Vec> normals;  // boundary rules only
  int level = 0;
  double grading = 1.0;

  std::size_t size() const { return nodes.size(); }
  double totalWeight() const;
};

/// Interior rule: tensor Gauss-Legendre on boxes, radial x angular product on
/// balls. grading >= 1 concentrates nodes toward the boundary (the radial
/// variable is substituted r = 1-(1-t)^q on balls; boxes use a polynomial
/// symmetric endpoint map). Node count grows geometrically with level.
QuadratureRule interiorRule(const Domain& dom, int level, double grading = 1.0);

/// Boundary rule: equispaced on circles, Gauss x equispaced product on
/// spheres, composite Gauss per open face on boxes. Total weight equals the
/// surface measure; normals are unit outer normals.
QuadratureRule boundaryRule(const Domain& dom, int level);

/// Weighted sum of f over the rule with a fixed pairwise reduction order.
/// Term evaluation is partitioned across workers; the result is bit-stable
/// for any worker count. Throws NonFiniteIntegrandError on a bad node.
double integrate(const std::function<double(const Vec&)>& f, const QuadratureRule& rule);

/// Same, with access to the node index (boundary integrands use normals).
double integrateIndexed(const std::function<double(std::size_t, const Vec&)>& f,
                        const QuadratureRule& rule);

struct PoincareBound {
  double value;
  std::string provenance;
};

/// Valid upper bound for the Poincare constant of zero-trace W^{1,1}
/// functions: half the minimal width for boxes, the radius for balls
/// (one-dimensional slicing argument; valid but not sharp).
PoincareBound poincareConstant(const Domain& dom);

/// Means of f over the lens Omega ∩ B(x, r) for each radius, via a local
/// polar rule with an exact-indicator cut. Used for trace estimates; the
/// resolution parameter refines the local rule (divergent traces show up as
/// growth under this refinement).
std::vector<double> shellAverages(const std::function<double(const Vec&)>& f, const Domain& dom,
                                  const Vec& x, const std::vector<double>& radii,
                                  int resolution = 32);

/// Halton sequence point in [0,1]^dim (bases 2,3,5,7), index >= 0.
Vec haltonPoint(std::size_t index, int dim);

}  // namespace soblab
