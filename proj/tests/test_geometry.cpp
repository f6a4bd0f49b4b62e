#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "soblab/geometry.hpp"
#include "soblab/testfn.hpp"
#include "test_support.hpp"

using namespace soblab;
namespace ts = testsupport;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("box interior rule: polynomial exactness and total weight") {
  const Domain box = Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  const QuadratureRule r = interiorRule(box, 4, 1.0);  // 16 x 16 nodes
  CHECK(r.size() == 256);
  CHECK(r.totalWeight() == doctest::Approx(1.0).epsilon(1e-14));
  const double v = integrate([](const Vec& x) { return x[0] * x[1]; }, r);
  CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
  for (double w : r.weights) CHECK(w > 0.0);
  for (const Vec& x : r.nodes) CHECK(box.contains(x, 1e-12));
}

TEST_CASE("disk interior rule integrates the area") {
  const Domain disk = Domain::unitDisk();
  const QuadratureRule r = interiorRule(disk, 4, 1.0);
  CHECK(integrate([](const Vec&) { return 1.0; }, r) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("graded rules keep the total weight") {
  const Domain disk = Domain::unitDisk();
  for (double q : {2.0, 3.0, 5.0}) {
    const QuadratureRule r = interiorRule(disk, 4, q);
    CHECK(r.totalWeight() == doctest::Approx(kPi).epsilon(1e-10));
    for (double w : r.weights) CHECK(w > 0.0);
  }
  const Domain box = Domain::box(Vec{0.0, 0.0}, Vec{2.0, 3.0});
  for (double q : {2.0, 4.0}) {
    const QuadratureRule r = interiorRule(box, 4, q);
    CHECK(r.totalWeight() == doctest::Approx(6.0).epsilon(1e-10));
  }
}

TEST_CASE("boundary singular integrand: grading restores accuracy") {
  // closed form: 2 pi int_0^1 (1-r)^{-1/2} r dr = 8 pi / 3; the oracle uses
  // the substitution r = 1 - w^2, which makes the integrand polynomial
  const double exact =
      2.0 * kPi * ts::integrate1d([](double w) { return 2.0 * (1.0 - w * w); }, 0.0, 1.0);
  CHECK(exact == doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-10));

  const Domain disk = Domain::unitDisk();
  auto f = [](const Vec& x) { return 1.0 / std::sqrt(1.0 - x.norm()); };
  const int level = 6;
  const double graded = integrate(f, interiorRule(disk, level, 3.0));
  const double plain = integrate(f, interiorRule(disk, level, 1.0));
  const double egr = std::abs(graded - exact) / exact;
  const double epl = std::abs(plain - exact) / exact;
  CHECK(egr < 1e-6);
  CHECK(epl > 1e-2);
}

TEST_CASE("grading neutrality for smooth integrands") {
  const Domain disk = Domain::unitDisk();
  auto f = [](const Vec& x) { return std::exp(x[0]) * (1.0 + x[1] * x[1]); };
  const double a = integrate(f, interiorRule(disk, 6, 1.0));
  const double b = integrate(f, interiorRule(disk, 6, 3.0));
  CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
}

TEST_CASE("boundary rules") {
  SUBCASE("circle: total weight 2 pi R") {
    const QuadratureRule b = boundaryRule(Domain::ball(Vec{0.5, -0.5}, 2.0), 3);
    CHECK(b.totalWeight() == doctest::Approx(4.0 * kPi).epsilon(1e-12));
  }
  SUBCASE("box surface in 3D: total weight 6") {
    const Domain box = Domain::box(Vec{0.0, 0.0, 0.0}, Vec{1.0, 1.0, 1.0});
    const QuadratureRule b = boundaryRule(box, 3);
    CHECK(b.totalWeight() == doctest::Approx(6.0).epsilon(1e-12));
    // nodes avoid edges and corners
    for (const Vec& x : b.nodes) {
      int onFace = 0;
      for (int i = 0; i < 3; ++i)
        if (x[i] == 0.0 || x[i] == 1.0) ++onFace;
      CHECK(onFace == 1);
    }
  }
  SUBCASE("sphere: second moment 4 pi / 3") {
    const QuadratureRule b = boundaryRule(Domain::ball(Vec{0.0, 0.0, 0.0}, 1.0), 4);
    const double m = integrate([](const Vec& x) { return x[0] * x[0]; }, b);
    CHECK(m == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-10));
  }
  SUBCASE("normals are unit outward") {
    const Domain ball = Domain::ball(Vec{1.0, 2.0}, 0.5);
    const QuadratureRule b = boundaryRule(ball, 3);
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(b.normals[i].norm() == doctest::Approx(1.0));
      CHECK(b.normals[i].dot(b.nodes[i] - ball.center()) > 0.0);
    }
  }
}

TEST_CASE("integrate: linearity and the non-finite guard") {
  const Domain disk = Domain::unitDisk();
  const QuadratureRule r = interiorRule(disk, 3, 1.0);
  auto f = [](const Vec& x) { return x[0] - 0.3 * x[1]; };
  auto g = [](const Vec& x) { return x.norm2(); };
  const double sum = integrate([&](const Vec& x) { return f(x) + g(x); }, r);
  CHECK(sum == doctest::Approx(integrate(f, r) + integrate(g, r)).epsilon(1e-14));
  CHECK_THROWS_AS(integrate([](const Vec& x) { return 1.0 / (x.norm() - x.norm()); }, r),
                  NonFiniteIntegrandError);
}

TEST_CASE("gradient energy of 2-|x|^2 over the unit disk") {
  // radial closed form: 2 pi int 4 r^2 * r dr = 2 pi
  const double exact = ts::diskRadial([](double r) { return 4.0 * r * r; });
  CHECK(exact == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  const TestFunction u = TestFunction::quadraticRadial(2.0, 1.0);
  const double v = integrate([&](const Vec& x) { return u.jet(x).grad.norm2(); },
                             interiorRule(Domain::unitDisk(), 5, 1.0));
  CHECK(v == doctest::Approx(2.0 * kPi).epsilon(1e-10));
}

TEST_CASE("refinement convergence for a smooth integrand") {
  const Domain disk = Domain::unitDisk();
  auto f = [](const Vec& x) { return 1.0 / (2.0 + x[0]); };
  double prev = 0.0, prevInc = 1e300;
  for (int L = 2; L <= 6; ++L) {
    const double v = integrate(f, interiorRule(disk, L, 1.0));
    if (L > 2) {
      const double inc = std::abs(v - prev);
      CHECK(inc <= prevInc * 1.0001 + 1e-15);
      prevInc = inc;
    }
    prev = v;
  }
  CHECK(prevInc < 1e-10);
}

TEST_CASE("Poincare upper bounds") {
  CHECK(poincareConstant(Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0})).value ==
        doctest::Approx(0.5));
  CHECK(poincareConstant(Domain::unitDisk()).value == doctest::Approx(1.0));
  CHECK(poincareConstant(Domain::box(Vec{0.0, 0.0}, Vec{2.0, 1.0})).value ==
        doctest::Approx(0.5));
  CHECK(!poincareConstant(Domain::unitDisk()).provenance.empty());
}

TEST_CASE("shell averages") {
  const Domain disk = Domain::unitDisk();
  const Vec x{1.0, 0.0};  // boundary point
  const std::vector<double> radii = {0.2, 0.1, 0.05};
  SUBCASE("constant function") {
    const auto avgs = shellAverages([](const Vec&) { return 3.5; }, disk, x, radii);
    for (double a : avgs) CHECK(a == doctest::Approx(3.5).epsilon(1e-12));
  }
  SUBCASE("2-|x|^2 tends to the boundary value 1") {
    const auto avgs =
        shellAverages([](const Vec& y) { return 2.0 - y.norm2(); }, disk, x, radii);
    CHECK(std::abs(avgs.back() - 1.0) < std::abs(avgs.front() - 1.0));
    CHECK(avgs.back() == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("(1-|x|)^{-1}: clipped averages keep growing with the cutoff") {
    // infinite mass near the boundary: the clipped means never plateau
    double prev = 0.0, prevInc = 0.0;
    for (double cap : {1e1, 1e2, 1e3, 1e4}) {
      auto u = [cap](const Vec& y) { return std::min(cap, 1.0 / (1.0 - y.norm())); };
      const double a = shellAverages(u, disk, x, {0.1}, 128)[0];
      if (prev != 0.0) {
        CHECK(a > prev);
        if (prevInc != 0.0) CHECK(a - prev > 0.6 * prevInc);
        prevInc = a - prev;
      }
      prev = a;
    }
    // a bounded function is untouched by the cutoffs
    auto v = [](const Vec& y) { return 2.0 - y.norm2(); };
    const double b1 = shellAverages(v, disk, x, {0.1}, 128)[0];
    auto vclip = [](const Vec& y) { return std::min(1e1, 2.0 - y.norm2()); };
    CHECK(shellAverages(vclip, disk, x, {0.1}, 128)[0] == doctest::Approx(b1));
  }
}

TEST_CASE("3D ball interior rule") {
  const Domain ball = Domain::ball(Vec{0.0, 0.0, 0.0}, 1.0);
  const QuadratureRule r = interiorRule(ball, 4, 1.0);
  CHECK(r.totalWeight() == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
  // by symmetry: int x3^2 = (1/3) int r^2 = (4 pi/3)(1/5)
  const double m = integrate([](const Vec& x) { return x[2] * x[2]; }, r);
  CHECK(m == doctest::Approx(4.0 * kPi / 15.0).epsilon(1e-10));
}

TEST_CASE("domain geometry helpers") {
  const Domain box = Domain::box(Vec{0.0, -1.0}, Vec{2.0, 1.0});
  CHECK(box.volume() == doctest::Approx(4.0));
  CHECK(box.surfaceArea() == doctest::Approx(8.0));
  CHECK(box.boundaryDistance(Vec{1.0, 0.0}) == doctest::Approx(1.0));
  const Domain ball = Domain::ball(Vec{0.0, 0.0, 0.0}, 2.0);
  CHECK(ball.volume() == doctest::Approx(32.0 * kPi / 3.0));
  CHECK(ball.surfaceArea() == doctest::Approx(16.0 * kPi));
}
