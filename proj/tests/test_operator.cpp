#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "soblab/matrix_field.hpp"

using namespace soblab;

namespace {

Mat diag2(double a, double b) {
  Mat m(2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("ellipticity constants") {
  const Domain box = Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  SUBCASE("identity") {
    const auto e = MatrixField::identity(2).ellipticity(box);
    CHECK(e.cA == doctest::Approx(1.0));
    CHECK(e.CA == doctest::Approx(1.0));
    CHECK(e.exact);
  }
  SUBCASE("constant diag(2,3)") {
    const auto e = MatrixField::constant(diag2(2.0, 3.0)).ellipticity(box);
    CHECK(e.cA == doctest::Approx(2.0));
    CHECK(e.CA == doctest::Approx(3.0));
  }
  SUBCASE("scalar profile 2+x1 on the unit box") {
    const auto e = MatrixField::scalarProfile(Expr::parse("2+x1"), 2).ellipticity(box);
    CHECK(e.cA == doctest::Approx(2.0));
    CHECK(e.CA == doctest::Approx(3.0));
    CHECK(e.exact);
  }
  SUBCASE("non-positive profile is an ellipticity violation") {
    const auto field = MatrixField::scalarProfile(Expr::parse("x1-2"), 2);
    CHECK_THROWS_AS(field.ellipticity(box), EllipticityError);
  }
}

TEST_CASE("divergence data") {
  const Domain box = Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  SUBCASE("identity: div A = 0, repeated divergence condition holds") {
    const auto d = MatrixField::identity(2).divergenceBounds(box);
    CHECK(d.divSup == doctest::Approx(0.0));
    CHECK(d.a2Holds);
    const auto oc = operatorConstants(MatrixField::identity(2), box);
    CHECK(oc.dA == doctest::Approx(0.0));
    CHECK(oc.divFree);
  }
  SUBCASE("profile 2+x1: div A = (1,0), d_A = 1/2, repeated divergence 0") {
    const auto A = MatrixField::scalarProfile(Expr::parse("2+x1"), 2);
    const Vec g = A.divergence(Vec{0.3, 0.7});
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[1] == doctest::Approx(0.0));
    const auto oc = operatorConstants(A, box);
    CHECK(oc.divSup == doctest::Approx(1.0));
    CHECK(oc.dA == doctest::Approx(0.5));
    CHECK(oc.a2Holds);
    CHECK(A.divergence2(Vec{0.5, 0.5}) == doctest::Approx(0.0));
  }
  SUBCASE("profile 2+x1^2: repeated divergence 2 > 0") {
    const auto A = MatrixField::scalarProfile(Expr::parse("2+x1^2"), 2);
    CHECK(A.divergence2(Vec{0.5, 0.5}) == doctest::Approx(2.0));
    CHECK(!A.divergenceBounds(box).a2Holds);
  }
}

TEST_CASE("operator action") {
  SUBCASE("A = Id, u = |x|^2: P u = 2n") {
    const auto A = MatrixField::identity(2);
    Mat hess(2);
    hess(0, 0) = hess(1, 1) = 2.0;
    CHECK(A.applyP(Vec{0.3, 0.4}, hess) == doctest::Approx(4.0));
  }
  SUBCASE("constant [[1,1],[1,2]], u = x1 x2: P u = a12 + a21") {
    Mat C(2);
    C(0, 0) = 1;
    C(0, 1) = C(1, 0) = 1;
    C(1, 1) = 2;
    Mat hess(2);
    hess(0, 1) = hess(1, 0) = 1.0;
    CHECK(MatrixField::constant(C).applyP(Vec{0.0, 0.0}, hess) == doctest::Approx(2.0));
  }
  SUBCASE("A = Id, u = 2-|x|^2 in 2D: P u = -4") {
    Mat hess(2);
    hess(0, 0) = hess(1, 1) = -2.0;
    CHECK(MatrixField::identity(2).applyP(Vec{0.1, 0.2}, hess) == doctest::Approx(-4.0));
  }
}

TEST_CASE("the A-norm") {
  SUBCASE("identity: (3,4) has norm 5") {
    CHECK(MatrixField::identity(2).aNorm(Vec{0.0, 0.0}, Vec{3.0, 4.0}) == doctest::Approx(5.0));
  }
  SUBCASE("diag(2,3): (1,1) has norm sqrt 5") {
    CHECK(MatrixField::constant(diag2(2, 3)).aNorm(Vec{0, 0}, Vec{1, 1}) ==
          doctest::Approx(std::sqrt(5.0)));
  }
  SUBCASE("zero vector") {
    CHECK(MatrixField::constant(diag2(2, 3)).aNorm(Vec{0, 0}, Vec{0, 0}) == doctest::Approx(0.0));
  }
  SUBCASE("norm equivalence sandwich at 1000 random pairs") {
    const Domain disk = Domain::unitDisk();
    const auto A = MatrixField::scalarProfile(Expr::parse("2+x1"), 2);
    const auto e = A.ellipticity(disk);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      Vec x{0.7 * unif(rng), 0.7 * unif(rng)};
      Vec xi{unif(rng), unif(rng)};
      const double q = A.aNormSq(x, xi);
      CHECK(q >= e.cA * xi.norm2() * (1.0 - 1e-12));
      CHECK(q <= e.CA * xi.norm2() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("divergence-form decomposition: div(A grad u) = P u + div A . grad u") {
  // finite-difference divergence of the flux field against the analytic split
  const auto A = MatrixField::scalarProfile(Expr::parse("2+x1+x2^2"), 2);
  const Expr uExpr = Expr::parse("1+x1^2*x2+x2^2");
  const Expr ux = uExpr.derivative(0), uy = uExpr.derivative(1);
  auto gradU = [&](const Vec& x) {
    const double v[2] = {x[0], x[1]};
    return Vec{ux.eval(v), uy.eval(v)};
  };
  auto flux = [&](const Vec& x) { return A.value(x).mul(gradU(x)); };
  const Expr uxx = ux.derivative(0), uxy = ux.derivative(1), uyy = uy.derivative(1);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(-0.8, 0.8);
  for (int i = 0; i < 50; ++i) {
    const Vec x{unif(rng), unif(rng)};
    const double h = 1e-5;
    double divFlux = 0.0;
    for (int d = 0; d < 2; ++d) {
      Vec xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      divFlux += (flux(xp)[d] - flux(xm)[d]) / (2 * h);
    }
    const double v[2] = {x[0], x[1]};
    Mat hess(2);
    hess(0, 0) = uxx.eval(v);
    hess(0, 1) = hess(1, 0) = uxy.eval(v);
    hess(1, 1) = uyy.eval(v);
    const double split = A.applyP(x, hess) + A.divergence(x).dot(gradU(x));
    CHECK(divFlux == doctest::Approx(split).epsilon(1e-7));
  }
}

TEST_CASE("divergence against finite differences of the entries") {
  const auto A = MatrixField::custom({{Expr::parse("2+x1*x2"), Expr::parse("x1")},
                                      {Expr::parse("x1"), Expr::parse("3+x2^2")}});
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-0.9, 0.9);
  for (int i = 0; i < 30; ++i) {
    const Vec x{unif(rng), unif(rng)};
    const double h = 1e-6;
    Vec fd(2);
    for (int r = 0; r < 2; ++r) {
      double s = 0.0;
      for (int c = 0; c < 2; ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        s += (A.value(xp)(r, c) - A.value(xm)(r, c)) / (2 * h);
      }
      fd[r] = s;
    }
    const Vec an = A.divergence(x);
    for (int r = 0; r < 2; ++r) CHECK(std::abs(an[r] - fd[r]) <= 1e-6 * (1 + std::abs(an[r])));
  }
}

TEST_CASE("asymmetric custom matrix is rejected") {
  CHECK_THROWS_AS(MatrixField::custom({{Expr::parse("1"), Expr::parse("x1")},
                                       {Expr::parse("0"), Expr::parse("1")}}),
                  DomainError);
}
