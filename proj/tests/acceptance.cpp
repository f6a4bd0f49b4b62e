// Acceptance suite: every criterion prints one PASS/FAIL line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "soblab/config.hpp"
#include "soblab/douglas.hpp"
#include "soblab/verifier.hpp"

using namespace soblab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void verdict(int criterion, const char* label, bool pass) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, label);
  CHECK_MESSAGE(pass, "criterion ", criterion, ": ", label);
}

}  // namespace

TEST_CASE("1. Green-identity reproduction") {
  Stopwatch sw;
  const Experiment ex(Domain::unitDisk(), WeightTriple::power(0.0),
                      TestFunction::quadraticRadial(2.0, 1.0), MatrixField::identity(2),
                      QuadSpec{{3, 4, 5}, 0.0});
  const IdentityReport rep = verifyIdentity(ex);
  const bool terms = std::abs(rep.term_I2 - 2.0 * kPi) <= 1e-8 * 2.0 * kPi &&
                     std::abs(rep.term_JP - 6.0 * kPi) <= 1e-8 * 6.0 * kPi &&
                     std::abs(rep.term_Jdiv) <= 1e-8 &&
                     std::abs(rep.theta + 4.0 * kPi) <= 1e-8 * 4.0 * kPi;
  const bool ok = terms && rep.relative_residual < 1e-8 && rep.converged && sw.seconds() < 5.0;
  verdict(1, "terms (2pi, 6pi, 0, -4pi) within 1e-8 relative, residual < 1e-8, < 5 s", ok);
}

TEST_CASE("2. singular radial case: graded quadrature converges, ungraded stalls") {
  Stopwatch sw;
  const QuadSpec levels{{3, 4, 5, 6, 7, 8}, 0.0};
  const Experiment graded(Domain::unitDisk(), WeightTriple::power(-3.5),
                          TestFunction::radialPower(-1.0, Vec{0.0, 0.0}),
                          MatrixField::identity(2), levels);
  const IdentityReport rep = verifyIdentity(graded);

  // the energy term settles (three-level agreement)
  std::vector<double> I2s;
  for (const auto& row : rep.levels)
    for (const auto& [k, v] : row.terms)
      if (k == "term_I2") I2s.push_back(v);
  const Trend t = classifySequence(I2s, 1e-3);

  const bool exponent = std::abs(rep.constants.at("boundary_exponent").value + 0.5) < 1e-12;

  Experiment plain = graded;
  plain.quad.grading = 1.0;
  const IdentityReport flat = verifyIdentity(plain);

  const bool ok = rep.relative_residual < 1e-3 && rep.converged && t.converged && exponent &&
                  flat.relative_residual >= 10.0 * rep.relative_residual && sw.seconds() < 60.0;
  verdict(2, "residual < 1e-3 graded, energy term stable, x10 worse ungraded, < 60 s", ok);
}

TEST_CASE("3. negative control: Hessian-norm divergence flagged, identity not verified") {
  const Experiment ex(Domain::box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}),
                      WeightTriple::power(0.0, kInf, HtildeNorm::anchored(1.0, 0.0), 1.0),
                      TestFunction::signedPower1d(0.25), MatrixField::identity(2),
                      QuadSpec{{3, 4, 5, 6, 7}, 1.0});
  const IdentityReport rep = verifyIdentity(ex);

  std::vector<double> hess;
  for (const auto& row : rep.levels)
    for (const auto& [k, v] : row.terms)
      if (k == "hessian_norm_interior") hess.push_back(v);
  bool monotone = hess.size() >= 4;
  for (std::size_t i = 1; i < hess.size(); ++i) monotone &= hess[i] > hess[i - 1];

  const CheckRecord rec = toRecord(rep);
  const bool ok = monotone && rep.diverging && rec.outcome == "diverged" && !rec.ok;
  verdict(3, "Hessian-norm integral diverges monotonically over >= 4 levels and is flagged", ok);
}

TEST_CASE("4. Douglas formula and harmonic-extension energies") {
  Stopwatch sw;
  const double e1 = douglasEnergy(BoundaryData::trigPolynomial({{1, 1.0, 0.0}}), 6);
  bool ok = std::abs(e1 - kPi) <= 1e-6;
  for (int k = 1; k <= 3; ++k) {
    const double ek =
        dirichletEnergyOfExtension(BoundaryData::trigPolynomial({{k, 1.0, 0.0}}), 6);
    ok = ok && std::abs(ek - k * kPi) <= 1e-6;
  }
  ok = ok && sw.seconds() < 10.0;
  verdict(4, "douglas(cos) = pi and dirichlet(extend(cos k)) = k pi within 1e-6, < 10 s", ok);
}

TEST_CASE("5. representation of the boundary term for p = 2, u = x1") {
  const auto rep = thetaRepresentationCheck(TestFunction::harmonicPoly(1, 0), 2.0, {4, 5, 6});
  const bool ok = std::abs(rep.theta_direct - 2.0 * kPi) <= 1e-6 * 2.0 * kPi &&
                  rep.rel_gap <= 1e-4;
  verdict(5, "direct flux 2 pi agrees with the double-form representation within 1e-4", ok);
}

TEST_CASE("6. Opial suite with C_Htilde = 2, C_P = 1 and the chained bound") {
  const Experiment ex(Domain::unitDisk(), WeightTriple::power(0.0),
                      TestFunction::bump(2, Vec{0.0, 0.0}, 1.0), MatrixField::identity(2),
                      QuadSpec{{3, 4, 5}, 0.0}, Tolerances{}, true);
  const IdentityReport id = verifyIdentity(ex);
  const auto opial = verifyOpial(ex, id);
  const auto simplified = verifySimplified(ex, id);
  bool ok = opial.size() == 2 && opial[0].applicable && opial[1].applicable;
  if (ok) {
    ok = std::abs(opial[0].constants.at("C_Htilde").value - 2.0) < 1e-12 &&
         std::abs(opial[0].constants.at("C_P").value - 1.0) < 1e-12 &&
         opial[0].margin >= 0.0 && opial[1].margin >= 0.0;
  }
  ok = ok && !simplified.empty() && simplified[0].applicable && simplified[0].holds &&
       std::abs(simplified[0].constants.at("Gamma").value - 8.0) < 1e-12;
  verdict(6, "both Opial margins >= 0 and int G_H <= Gamma * energy with Gamma = 8", ok);
}

TEST_CASE("7. kappa regime on the unit box") {
  const Domain box = Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  const TestFunction u = TestFunction::bump(2, Vec{0.5, 0.5}, 0.45);
  const Experiment small(box, WeightTriple::power(0.0), u,
                         MatrixField::scalarProfile(Expr::parse("2+0.01*x1"), 2),
                         QuadSpec{{3, 4, 5}, 1.0}, Tolerances{}, true);
  const auto repsSmall = verifySimplified(small, verifyIdentity(small));
  bool ok = repsSmall.size() == 2 && repsSmall[1].applicable &&
            std::abs(repsSmall[1].constants.at("kappa").value - 0.005) <= 1e-12 &&
            repsSmall[1].holds && repsSmall[1].margin >= 0.0;

  const Experiment steep(box, WeightTriple::power(0.0), u,
                         MatrixField::scalarProfile(Expr::parse("2+10*x1"), 2),
                         QuadSpec{{3, 4}, 1.0}, Tolerances{}, true);
  const auto repsSteep = verifySimplified(steep, verifyIdentity(steep));
  ok = ok && !repsSteep[1].applicable && repsSteep[1].constants.at("kappa").value >= 1.0;
  verdict(7, "kappa = 0.005 exact with the bound holding; kappa >= 1 not applicable", ok);
}

TEST_CASE("8. Metafune-Spina identity for p in {2, 3}") {
  const Domain box = Domain::box(Vec{-1.25, -1.25}, Vec{1.25, 1.25});
  const TestFunction u = TestFunction::bump(4, Vec{0.0, 0.0}, 1.0);
  const IdentityReport p2 =
      verifyMetafuneSpina(box, u, 2.0, std::nullopt, QuadSpec{{5, 6, 7}, 1.0}, Tolerances{});
  const IdentityReport p3 =
      verifyMetafuneSpina(box, u, 3.0, std::nullopt, QuadSpec{{5, 6, 7}, 1.0}, Tolerances{});
  const bool ok = p2.relative_residual < 1e-8 && p3.relative_residual < 1e-6 && p2.converged &&
                  p3.converged;
  verdict(8, "residual < 1e-8 (p=2) and < 1e-6 (p=3) on a compactly supported bump", ok);
}

TEST_CASE("9. property suites") {
  bool ok = true;

  // pointwise composition identity at 100 random points per configured triple
  {
    const Experiment green(Domain::unitDisk(), WeightTriple::power(0.0),
                           TestFunction::quadraticRadial(2.0, 1.0), MatrixField::identity(2));
    const Experiment singular(Domain::unitDisk(), WeightTriple::power(-3.5),
                              TestFunction::radialPower(-1.0, Vec{0.0, 0.0}),
                              MatrixField::identity(2));
    const Experiment profile(Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0}),
                             WeightTriple::power(0.0),
                             TestFunction::bump(2, Vec{0.5, 0.5}, 0.45),
                             MatrixField::scalarProfile(Expr::parse("2+x1"), 2), QuadSpec{},
                             Tolerances{}, true);
    for (const Experiment* ex : {&green, &singular, &profile}) {
      const auto rep = verifyPointwiseIdentity(*ex, 100, 1e-8);
      ok = ok && rep.holds && rep.points == 100;
    }
  }

  // analytic vs finite-difference jets at the stated tolerances
  {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unif(-0.7, 0.7);
    const TestFunction fns[] = {TestFunction::quadraticRadial(2.0, 1.0),
                                TestFunction::radialPower(-1.0, Vec{0.0, 0.0}),
                                TestFunction::bump(3, Vec{0.0, 0.0}, 1.0),
                                TestFunction::harmonicPoly(2, 0)};
    for (const auto& u : fns) {
      int done = 0;
      while (done < 200) {
        const Vec x{unif(rng), unif(rng)};
        if (u.smoothnessClearance(x) < 0.05) continue;
        ++done;
        const Jet a = u.jet(x);
        const Jet g = u.fdJet(x, 1e-5);
        const Jet h = u.fdJet(x, 1e-4);
        ok = ok && (a.grad - g.grad).norm() <= 1e-6 * (1.0 + a.grad.norm());
        double hd = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) hd = std::max(hd, std::abs(a.hess(i, j) - h.hess(i, j)));
        ok = ok && hd <= 1e-4 * (1.0 + a.hess.frobeniusNorm());
      }
    }
  }

  // boundary-term invariance under the antiderivative normalization
  {
    const Experiment a(Domain::unitDisk(), WeightTriple::power(0.0),
                       TestFunction::quadraticRadial(2.0, 1.0), MatrixField::identity(2));
    const Experiment b(Domain::unitDisk(),
                       WeightTriple::power(0.0, kInf, HtildeNorm::anchored(1.0, 5.0)),
                       TestFunction::quadraticRadial(2.0, 1.0), MatrixField::identity(2));
    ok = ok && std::abs(boundaryTerm(a, 5) - boundaryTerm(b, 5)) <= 1e-12;
  }

  // norm-equivalence sandwich at 1000 random pairs
  {
    const Domain disk = Domain::unitDisk();
    const auto A = MatrixField::scalarProfile(Expr::parse("2+x1"), 2);
    const auto e = A.ellipticity(disk);
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const Vec x{0.7 * unif(rng), 0.7 * unif(rng)};
      const Vec xi{unif(rng), unif(rng)};
      const double q = A.aNormSq(x, xi);
      ok = ok && q >= e.cA * xi.norm2() * (1 - 1e-12) && q <= e.CA * xi.norm2() * (1 + 1e-12);
    }
  }

  // tangential gradient on the three boundary-vanishing functions
  {
    const Domain disk = Domain::unitDisk();
    const TestFunction fns[] = {
        TestFunction::quadraticRadial(1.0, 1.0),
        TestFunction::custom(Expr::parse("(1-x1^2-x2^2)*(2+x1)"), 2),
        TestFunction::bump(2, Vec{0.0, 0.0}, 1.0)};
    for (const auto& v : fns) {
      const auto rep = verifyTangentialGradient(v, disk, 4);
      ok = ok && rep.applicable && rep.holds && rep.maxTangential <= 1e-8;
    }
  }

  // determinism: byte-identical reports across two runs of the same config
  {
    const char* cfgText = R"({
      "name": "det",
      "domain": {"kind": "ball", "n": 2, "R": 1.0},
      "weight": {"family": "power", "alpha": 0.0},
      "function": {"family": "quadratic-radial", "a": 2.0, "b": 1.0},
      "operator": {"kind": "identity"},
      "quadrature": {"levels": [3, 4, 5], "grading": "auto"},
      "checks": ["identity", "ineq-divfree", "pointwise"]
    })";
    const ExperimentConfig cfg = ExperimentConfig::fromJsonText(cfgText, "det");
    ok = ok && toJson(runConfig(cfg)) == toJson(runConfig(cfg));
  }

  verdict(9, "pointwise identity, jets, theta invariance, norm sandwich, tangential, determinism",
          ok);
}
