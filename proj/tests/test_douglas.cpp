#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "soblab/douglas.hpp"

using namespace soblab;

namespace {
constexpr double kPi = std::numbers::pi;

BoundaryData cosMode(int k, double a = 1.0) { return BoundaryData::trigPolynomial({{k, a, 0.0}}); }
}  // namespace

TEST_CASE("Douglas energy") {
  SUBCASE("constants carry no energy") {
    CHECK(douglasEnergy(BoundaryData::trigPolynomial({{0, 3.0, 0.0}}), 5) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("cos theta carries energy pi") {
    CHECK(douglasEnergy(cosMode(1), 5) == doctest::Approx(kPi).epsilon(1e-10));
  }
  SUBCASE("cos k theta carries energy k pi") {
    CHECK(douglasEnergy(cosMode(2), 5) == doctest::Approx(2.0 * kPi).epsilon(1e-10));
    CHECK(douglasEnergy(cosMode(3), 5) == doctest::Approx(3.0 * kPi).epsilon(1e-10));
  }
  SUBCASE("mode additivity") {
    const BoundaryData g =
        BoundaryData::trigPolynomial({{1, 0.5, 0.0}, {2, 0.0, 1.5}, {4, -1.0, 0.0}});
    const double expected = kPi * (1 * 0.25 + 2 * 2.25 + 4 * 1.0);
    CHECK(douglasEnergy(g, 6) == doctest::Approx(expected).epsilon(1e-8));
  }
  SUBCASE("rotation invariance") {
    // cos(theta + phi) = cos phi cos theta - sin phi sin theta
    const double phi = 0.7;
    const BoundaryData g =
        BoundaryData::trigPolynomial({{1, std::cos(phi), -std::sin(phi)}});
    CHECK(douglasEnergy(g, 6) == doctest::Approx(douglasEnergy(cosMode(1), 6)).epsilon(1e-10));
  }
  SUBCASE("closed-form data agrees with the mode path") {
    const BoundaryData g = BoundaryData::closedForm(Expr::parse("cos(s)"));
    CHECK(douglasEnergy(g, 5) == doctest::Approx(kPi).epsilon(1e-8));
  }
}

TEST_CASE("Poisson extension") {
  SUBCASE("kernel normalization: constants extend to themselves") {
    const BoundaryData g = BoundaryData::trigPolynomial({{0, 1.0, 0.0}});
    CHECK(poissonExtend(g, Vec{0.3, -0.4}) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("cos theta extends to x1") {
    const BoundaryData g = cosMode(1);
    CHECK(poissonExtend(g, Vec{0.3, 0.4}) == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("the extension is harmonic (finite-difference Laplacian)") {
    const BoundaryData g =
        BoundaryData::trigPolynomial({{2, 1.0, 0.5}, {3, -0.3, 0.0}});
    for (const Vec x : {Vec{0.2, 0.1}, Vec{-0.4, 0.3}, Vec{0.0, -0.55}}) {
      const double h = 1e-4;
      double lap = 0.0;
      for (int d = 0; d < 2; ++d) {
        Vec xp = x, xm = x;
        xp[d] += h;
        xm[d] -= h;
        lap += (poissonExtend(g, xp) - 2.0 * poissonExtend(g, x) + poissonExtend(g, xm)) /
               (h * h);
      }
      CHECK(std::abs(lap) < 1e-6);
    }
  }
  SUBCASE("outside the disk is rejected") {
    CHECK_THROWS_AS(poissonExtend(cosMode(1), Vec{1.0, 0.1}), DomainError);
  }
}

TEST_CASE("Dirichlet energy of the extension equals the Douglas energy") {
  for (int k = 1; k <= 5; ++k) {
    const BoundaryData g = cosMode(k);
    const double dirichlet = dirichletEnergyOfExtension(g, 6);
    const double douglas = douglasEnergy(g, 6);
    CHECK(dirichlet == doctest::Approx(k * kPi).epsilon(1e-6));
    CHECK(std::abs(dirichlet - douglas) <= 1e-6 * std::max(1.0, douglas));
  }
}

TEST_CASE("Sobolev-Bregman form with the disk Feller kernel") {
  SUBCASE("constants carry no energy") {
    CHECK(fellerForm(BoundaryData::trigPolynomial({{0, 2.0, 0.0}}), 2.0, 5) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("p = 2 calibration against twice the Douglas energy") {
    CHECK(fellerForm(cosMode(1), 2.0, 5) == doctest::Approx(2.0 * kPi).epsilon(1e-9));
    const BoundaryData g = BoundaryData::trigPolynomial({{1, 1.0, 1.0}});
    CHECK(fellerForm(g, 2.0, 5) == doctest::Approx(4.0 * kPi).epsilon(1e-9));
    for (const auto& data :
         {BoundaryData::trigPolynomial({{2, 0.7, -0.2}}),
          BoundaryData::trigPolynomial({{1, 1.0, 0.0}, {3, 0.0, 0.4}})}) {
      CHECK(fellerForm(data, 2.0, 6) ==
            doctest::Approx(2.0 * douglasEnergy(data, 6)).epsilon(1e-9));
    }
  }
  SUBCASE("p < 2 is rejected") {
    CHECK_THROWS_AS(fellerForm(cosMode(1), 1.5, 4), DomainError);
  }
}

TEST_CASE("direct boundary flux of u^p") {
  SUBCASE("u = x1, p = 2: flux 2 pi") {
    CHECK(thetaDirect(TestFunction::harmonicPoly(1, 0), 2.0, 5) ==
          doctest::Approx(2.0 * kPi).epsilon(1e-10));
  }
  SUBCASE("u = 2 + x1, p = 2: flux 2 pi") {
    CHECK(thetaDirect(TestFunction::custom(Expr::parse("2+x1"), 2), 2.0, 5) ==
          doctest::Approx(2.0 * kPi).epsilon(1e-10));
  }
}

TEST_CASE("representation of the boundary term") {
  SUBCASE("harmonic u = x1, p = 2: both sides equal 2 pi") {
    const auto rep = thetaRepresentationCheck(TestFunction::harmonicPoly(1, 0), 2.0, {4, 5});
    CHECK(rep.harmonic);
    CHECK(rep.theta_direct == doctest::Approx(2.0 * kPi).epsilon(1e-8));
    CHECK(rep.representation == doctest::Approx(2.0 * kPi).epsilon(1e-6));
    CHECK(rep.rel_gap < 1e-4);
    CHECK(rep.converged);
  }
  SUBCASE("constant u: both sides vanish") {
    const auto rep =
        thetaRepresentationCheck(TestFunction::quadraticRadial(2.0, 0.0), 2.0, {4, 5});
    CHECK(rep.theta_direct == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(std::abs(rep.representation) < 1e-9);
  }
  SUBCASE("positive harmonic u = 2 + x1: constants cancel in the double form") {
    const auto rep =
        thetaRepresentationCheck(TestFunction::custom(Expr::parse("2+x1"), 2), 2.0, {4, 5});
    CHECK(rep.harmonic);
    CHECK(rep.theta_direct == doctest::Approx(2.0 * kPi).epsilon(1e-8));
    CHECK(rep.sobolev_bregman == doctest::Approx(2.0 * kPi).epsilon(1e-6));
    CHECK(std::abs(rep.volume_term) < 1e-9);
    CHECK(rep.rel_gap < 1e-4);
  }
  SUBCASE("non-harmonic data: the gap is reported as a finding") {
    const auto rep =
        thetaRepresentationCheck(TestFunction::quadraticRadial(2.0, 1.0), 2.0, {4, 5});
    CHECK(!rep.harmonic);
    CHECK(rep.rel_gap > 1e-3);  // genuine gap, not quadrature noise
    REQUIRE(!rep.messages.empty());
    CHECK(rep.messages.front().find("finding") != std::string::npos);
  }
}
