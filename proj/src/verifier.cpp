#include "soblab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "soblab/parallel.hpp"

namespace soblab {

namespace {

double relScale(double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

Domain shrinkDomain(const Domain& d, double factor) {
  if (d.kind() == Domain::Kind::Ball) return Domain::ball(d.center(), factor * d.radius());
  Vec lo = d.lo(), hi = d.hi();
  for (int i = 0; i < d.dim(); ++i) {
    const double c = 0.5 * (lo[i] + hi[i]);
    const double w = 0.5 * (hi[i] - lo[i]) * factor;
    lo[i] = c - w;
    hi[i] = c + w;
  }
  return Domain::box(lo, hi);
}

/// Shell averages of Htilde(u) at boundary sample points; the Dirichlet
/// surrogate for "Htilde(u) vanishes on the boundary".
bool htildeVanishesOnBoundary(const Experiment& ex, std::string& note) {
  const QuadratureRule b = boundaryRule(ex.domain, 3);
  const int npts = 8;
  const double diam = ex.domain.diameter();
  const std::vector<double> radii = {0.08 * diam, 0.04 * diam, 0.02 * diam};
  const double B = ex.weight.B();
  const auto at0 = ex.weight.HtildeEndpoint(false);
  const auto atB = ex.weight.HtildeEndpoint(true);
  auto f = [&](const Vec& y) {
    const double v = ex.u.value(y);
    if (v > 0.0 && v < B) return ex.weight.Htilde(v);
    // u sits at an endpoint: use the continuous extension of Htilde, or a
    // sentinel that fails the vanishing test when there is none
    const auto& lim = v <= 0.0 ? at0 : atB;
    return lim ? *lim : 1e30;
  };
  double worst = 0.0;
  for (int k = 0; k < npts; ++k) {
    const std::size_t idx = k * b.size() / npts;
    const auto avgs = shellAverages(f, ex.domain, b.nodes[idx], radii);
    worst = std::max(worst, std::abs(avgs.back()));
  }
  note = "max |shell average of Htilde(u)| over " + std::to_string(npts) +
         " boundary points: " + std::to_string(worst);
  return worst <= ex.tol.trace;
}

/// Htilde >= 0 on the part of (0,B) actually visited by u.
bool htildeNonNegative(const Experiment& ex, std::string& note) {
  const ValueRange r = ex.u.range(ex.domain);
  const double B = ex.weight.B();
  double lo = std::max(r.lo, 1e-12);
  double hi = std::min(r.hi, B == kInf ? std::max(10.0, 2.0 * std::abs(r.hi)) : B * (1 - 1e-12));
  if (!(hi > lo)) return true;
  double worst = 0.0;
  for (int i = 0; i < 128; ++i) {
    const double s = std::exp(std::log(lo) + i / 127.0 * (std::log(hi) - std::log(lo)));
    worst = std::min(worst, ex.weight.Htilde(s));
  }
  note = "min Htilde over the visited value range: " + std::to_string(worst);
  return worst >= -1e-10 * (1.0 + std::abs(worst));
}

struct GhcInfo {
  bool ok = false;
  double value = 0.0;
  std::string provenance;
};

GhcInfo weightScaleConstant(const Experiment& ex) {
  GhcInfo out;
  if (auto cf = ex.weight.ghcClosedForm()) {
    out.ok = true;
    out.value = *cf;
    out.provenance = "closed form for " + ex.weight.describe();
    return out;
  }
  const ValueRange r = ex.u.range(ex.domain);
  const double B = ex.weight.B();
  const double lo = std::max(r.lo, 1e-9);
  const double hi = std::min(std::max(r.hi, lo * 2.0),
                             B == kInf ? std::max(10.0, 2.0 * std::abs(r.hi)) : B * (1 - 1e-12));
  const GhcResult g = ex.weight.ghcConstant(lo, hi, 256);
  if (g.constant) {
    out.ok = true;
    out.value = *g.constant;
    out.provenance = g.provenance;
  } else {
    out.provenance = g.provenance;
  }
  return out;
}

/// Fourth-order central-difference Hessian of a scalar field by Richardson
/// extrapolation of the second-order stencil.
Mat fdHessian4(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  auto hess2 = [&](double step) {
    const int n = x.size();
    Mat H(n);
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (step * step);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vec a = x, b = x, c = x, d = x;
        a[i] += step;
        a[j] += step;
        b[i] += step;
        b[j] -= step;
        c[i] -= step;
        c[j] += step;
        d[i] -= step;
        d[j] -= step;
        H(i, j) = H(j, i) = (f(a) - f(b) - f(c) + f(d)) / (4.0 * step * step);
      }
    return H;
  };
  const Mat A = hess2(h);
  const Mat B = hess2(0.5 * h);
  Mat out(x.size());
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < x.size(); ++j) out(i, j) = (4.0 * B(i, j) - A(i, j)) / 3.0;
  return out;
}

}  // namespace

std::optional<double> Experiment::predictedBoundaryExponent() const {
  if (weight.family() != WeightFamily::Power) return std::nullopt;
  const double beta = weight.powerAlpha();
  switch (u.family()) {
    case TestFamily::RadialPower:
      if (domain.kind() == Domain::Kind::Ball) return u.radialAlpha() * (beta + 2.0) - 2.0;
      return std::nullopt;
    case TestFamily::QuadraticRadial:
    case TestFamily::HarmonicPoly: {
      if (beta == 0.0) return 0.0;
      const ValueRange r = u.range(domain);
      if (r.lo > 1e-12 && (weight.B() == kInf || r.hi < weight.B() * (1 - 1e-12))) return 0.0;
      return std::nullopt;
    }
    case TestFamily::Bump:
      return beta == 0.0 ? std::optional<double>(0.0) : std::nullopt;
    default:
      return std::nullopt;
  }
}

double Experiment::resolveGrading() const {
  if (quad.grading >= 1.0) return quad.grading;
  if (auto g = predictedBoundaryExponent()) {
    if (*g <= -1.0) return 8.0;  // non-integrable: grading cannot restore convergence
    return std::clamp(std::ceil(2.0 / (1.0 + *g)), 1.0, 8.0);
  }
  return 3.0;
}

double Experiment::residualTolerance() const {
  const auto g = predictedBoundaryExponent();
  return (g && *g < 0.0) ? tol.singular : tol.smooth;
}

double boundaryTerm(const Experiment& ex, int level) {
  const QuadratureRule b = boundaryRule(ex.domain, level);
  const double B = ex.weight.B();
  const double step = 1e-8 * ex.domain.diameter();
  return integrateIndexed(
      [&](std::size_t i, const Vec& x) {
        const Vec An = ex.A.value(x).mul(b.normals[i]);
        const double v = ex.u.value(x);
        if (v > 0.0 && v < B && std::isfinite(v)) {
          const Jet J = ex.u.jet(x);
          return ex.weight.H(v) * An.dot(J.grad);
        }
        // u sits at an endpoint of (0,B) on the boundary: the trace of the
        // restricted flux is its limit along the inward normal
        auto flux = [&](double t) -> std::optional<double> {
          const Vec y = x - t * b.normals[i];
          const double vy = ex.u.value(y);
          if (!(vy > 0.0 && vy < B && std::isfinite(vy))) return std::nullopt;
          const Jet J = ex.u.jet(y);
          return ex.weight.H(vy) * An.dot(J.grad);
        };
        const auto g1 = flux(step);
        if (!g1) return 0.0;  // u sits at the endpoint inside as well
        const auto g2 = flux(0.25 * step);
        if (!g2) return 0.0;
        // power-law extrapolation: a decaying flux has limit zero
        if (std::abs(*g1) > 1e-300 && std::abs(*g2) > 1e-300) {
          const double p = std::log(std::abs(*g1) / std::abs(*g2)) / std::log(4.0);
          if (p > 0.05) return 0.0;
        }
        return *g2;
      },
      b);
}

LevelTerms computeLevelTerms(const Experiment& ex, int level) {
  const double q = ex.resolveGrading();
  const QuadratureRule rule = interiorRule(ex.domain, level, q);
  const std::size_t N = rule.size();
  const double B = ex.weight.B();

  constexpr int kT = 9;  // I2 JP Jdiv Jabs GH opMixed opGrad2h hessHt PHtAbs
  std::vector<std::vector<double>> cols(kT, std::vector<double>(N, 0.0));
  std::vector<char> excluded(N, 0);

  parallelFor(N, [&](std::size_t i) {
    const Vec& x = rule.nodes[i];
    const double w = rule.weights[i];
    const double uval = ex.u.value(x);
    if (!(uval > 0.0 && uval < B)) {
      excluded[i] = 1;
      return;
    }
    const Jet J = ex.u.jet(x);
    const TripleValues tv = ex.weight.eval(uval);
    const Mat A = ex.A.value(x);
    const Vec Agrad = A.mul(J.grad);
    const double gradA2 = J.grad.dot(Agrad);
    const double Pu = A.frobenius(J.hess);
    const Vec divA = ex.A.divergence(x);
    const double g2 = J.grad.norm2();
    const double Tval = tv.H / tv.h;

    cols[0][i] = w * tv.h * gradA2;
    cols[1][i] = w * (-Pu * tv.H);
    cols[2][i] = w * (-divA.dot(J.grad) * tv.H);
    cols[3][i] = w * std::abs(Pu * tv.H);
    cols[4][i] = w * (tv.H * tv.H / tv.h);
    cols[5][i] = w * std::sqrt(g2) * std::abs(Tval) * tv.h;
    cols[6][i] = w * g2 * tv.h;
    Mat comp = tv.h * Mat::outer(J.grad, J.grad);
    comp += tv.H * J.hess;
    cols[7][i] = w * comp.frobeniusNorm();
    cols[8][i] = w * std::abs(tv.h * gradA2 + tv.H * Pu);
  });

  for (int t = 0; t < kT; ++t)
    for (std::size_t i = 0; i < N; ++i)
      if (!std::isfinite(cols[t][i])) throw NonFiniteIntegrandError(i, rule.nodes[i].str());

  LevelTerms out;
  out.I2 = pairwiseSum(cols[0].data(), N);
  out.JP = pairwiseSum(cols[1].data(), N);
  out.Jdiv = pairwiseSum(cols[2].data(), N);
  out.Jabs = pairwiseSum(cols[3].data(), N);
  out.GH = pairwiseSum(cols[4].data(), N);
  out.opialMixed = pairwiseSum(cols[5].data(), N);
  out.opialGrad2h = pairwiseSum(cols[6].data(), N);
  out.hessHtilde = pairwiseSum(cols[7].data(), N);
  out.PHtAbs = pairwiseSum(cols[8].data(), N);
  for (std::size_t i = 0; i < N; ++i) out.excluded += excluded[i];
  out.theta = boundaryTerm(ex, level);
  out.residual = std::abs(out.I2 - (out.JP + out.Jdiv + out.theta));
  out.relResidual = out.residual / std::max({1.0, std::abs(out.I2),
                                             std::abs(out.JP) + std::abs(out.Jdiv) +
                                                 std::abs(out.theta)});
  return out;
}

IdentityReport verifyIdentity(const Experiment& ex) {
  IdentityReport rep;
  rep.name = ex.restricted ? "identity-restricted" : "identity";
  const double tol = ex.residualTolerance();
  const Domain interiorPart = shrinkDomain(ex.domain, 0.8);

  std::vector<double> rels, I2s, GHs, hessHts, hessLocs;
  LevelTerms last;
  long excludedTotal = 0;
  for (int L : ex.quad.levels) {
    LevelTerms t = computeLevelTerms(ex, L);
    t.hessLocal = integrate(
        [&](const Vec& x) { return ex.u.jet(x).hess.frobeniusNorm(); },
        interiorRule(interiorPart, L, 1.0));
    LevelRow row;
    row.level = L;
    row.terms = {{"term_I2", t.I2},
                 {"term_JP", t.JP},
                 {"term_Jdiv", t.Jdiv},
                 {"theta", t.theta},
                 {"residual", t.residual},
                 {"relative_residual", t.relResidual},
                 {"int_GH", t.GH},
                 {"hessian_norm_interior", t.hessLocal},
                 {"hessian_norm_Htilde", t.hessHtilde}};
    rep.levels.push_back(std::move(row));
    rels.push_back(t.relResidual);
    I2s.push_back(t.I2);
    GHs.push_back(t.GH);
    hessHts.push_back(t.hessHtilde);
    hessLocs.push_back(t.hessLocal);
    excludedTotal += t.excluded;
    last = t;
  }

  rep.term_I2 = last.I2;
  rep.term_JP = last.JP;
  rep.term_Jdiv = last.Jdiv;
  rep.theta = last.theta;
  rep.term_Jabs = last.Jabs;
  rep.term_GH = last.GH;
  rep.opial_mixed = last.opialMixed;
  rep.opial_grad2h = last.opialGrad2h;
  rep.term_PHtAbs = last.PHtAbs;
  rep.residual = last.residual;
  rep.relative_residual = last.relResidual;
  rep.quadrature_level = ex.quad.levels.back();

  bool residualsOk = rels.size() >= 3;
  if (residualsOk)
    for (std::size_t k = rels.size() - 3; k < rels.size(); ++k) residualsOk &= rels[k] <= tol;
  rep.converged = residualsOk;

  const Trend localTrend = classifySequence(hessLocs, tol);
  const Trend compTrend = classifySequence(hessHts, tol);
  const Trend ghTrend = classifySequence(GHs, tol);
  if (localTrend.diverging) {
    rep.diverging = true;
    rep.divergent_term = "hessian-norm (interior)";
    rep.hypothesis_notes.push_back(
        "u in W^{2,1}_loc: violated (interior Hessian-norm integral diverges under refinement)");
  } else {
    rep.hypothesis_notes.push_back("u in W^{2,1}_loc: checked numerically");
  }
  if (compTrend.diverging) {
    rep.diverging = true;
    if (rep.divergent_term.empty()) rep.divergent_term = "hessian-norm of Htilde(u)";
    rep.hypothesis_notes.push_back(
        "Htilde(u) in W^{2,1}: violated (composition Hessian-norm integral diverges)");
  } else {
    rep.hypothesis_notes.push_back("Htilde(u) in W^{2,1}: checked numerically");
  }
  rep.gh_diverging = ghTrend.diverging;
  if (rep.gh_diverging) rep.messages.push_back("int G_H(u) diverges under refinement");
  if (excludedTotal > 0 && !ex.restricted)
    rep.hypothesis_notes.push_back(
        "u leaves (0,B) on part of the domain; integrals taken over {u in (0,B)}");

  const double qGrading = ex.resolveGrading();
  rep.constants["grading_q"] = {qGrading, ex.quad.grading >= 1.0 ? "configured" : "auto"};
  if (auto g = ex.predictedBoundaryExponent())
    rep.constants["boundary_exponent"] = {*g, "predicted from family parameters"};
  rep.constants["residual_tolerance"] = {tol, "smooth 1e-6 / singular 1e-3 policy"};
  return rep;
}

std::vector<InequalityReport> verifyInequalities(const Experiment& ex, const IdentityReport& id) {
  const OperatorConstants oc = operatorConstants(ex.A, ex.domain, ex.constantSamples);
  const double tol = ex.residualTolerance();
  std::vector<InequalityReport> out;

  {
    InequalityReport r;
    r.name = "ineq-divfree";
    r.applicable = oc.divFree;
    if (!r.applicable) {
      r.messages.push_back("div A not identically zero (sup " + std::to_string(oc.divSup) + ")");
    } else {
      r.lhs = id.term_I2;
      r.rhs = id.term_Jabs + id.theta;
      r.margin = r.rhs - r.lhs;
      r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    }
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "ineq-general";
    r.applicable = !oc.divFree;
    r.constants["d_A"] = {oc.dA, "div sup: " + oc.divProvenance + "; c_A: " + oc.cProvenance};
    if (!r.applicable) {
      r.messages.push_back("div A vanishes; the div-free bound applies instead");
    } else if (id.gh_diverging) {
      r.holds = true;
      r.lhs = id.term_I2;
      r.rhs = kInf;
      r.margin = kInf;
      r.messages.push_back("int G_H diverges: the bound holds trivially and is uninformative");
    } else {
      r.lhs = id.term_I2;
      r.rhs = oc.dA * id.term_GH + 2.0 * id.term_Jabs + 2.0 * id.theta;
      r.margin = r.rhs - r.lhs;
      r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    }
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "theta-trace";
    r.constants["d_A"] = {oc.dA, oc.divProvenance};
    if (id.gh_diverging && oc.dA > 0) {
      r.holds = true;
      r.lhs = -id.theta;
      r.rhs = kInf;
      r.margin = kInf;
      r.messages.push_back("int G_H diverges: trace bound trivially true");
    } else {
      r.lhs = -id.theta;
      r.rhs = 0.25 * oc.dA * id.term_GH + id.term_Jabs;
      r.margin = r.rhs - r.lhs;
      r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<InequalityReport> verifySignSimplification(const Experiment& ex,
                                                       const IdentityReport& id) {
  const OperatorConstants oc = operatorConstants(ex.A, ex.domain, ex.constantSamples);
  const double tol = ex.residualTolerance();
  std::vector<InequalityReport> out;

  std::string noteA2 = oc.a2Holds ? "repeated divergence <= 0" : "repeated divergence positive";
  std::string noteHt0, noteHtPos;
  const bool dirichlet = htildeVanishesOnBoundary(ex, noteHt0);
  const bool nonneg = htildeNonNegative(ex, noteHtPos);

  auto makeNA = [&](const char* name, const std::string& why) {
    InequalityReport r;
    r.name = name;
    r.applicable = false;
    r.messages.push_back(why);
    return r;
  };

  if (!oc.a2Holds || !dirichlet || !nonneg) {
    std::string why = "precondition failed: ";
    if (!oc.a2Holds) why += "[A2] " + noteA2 + " ";
    if (!dirichlet) why += "[Htilde(u)=0 on boundary] " + noteHt0 + " ";
    if (!nonneg) why += "[Htilde >= 0] " + noteHtPos;
    out.push_back(makeNA("sign-theta", why));
    out.push_back(makeNA("sign-divterm", why));
    out.push_back(makeNA("sign-clean", why));
    return out;
  }

  {
    InequalityReport r;
    r.name = "sign-theta";
    r.lhs = id.theta;
    r.rhs = 0.0;
    r.margin = -id.theta;
    r.holds = id.theta <= tol * relScale(id.theta, 0.0);
    r.messages.push_back(noteHt0);
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "sign-divterm";
    const double divTerm = -id.term_Jdiv;
    r.lhs = -divTerm;
    r.rhs = 0.0;
    r.margin = divTerm;
    r.holds = divTerm >= -tol * relScale(divTerm, 0.0);
    r.messages.push_back(noteA2);
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "sign-clean";
    r.lhs = id.term_I2;
    r.rhs = id.term_Jabs;
    r.margin = r.rhs - r.lhs;
    r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<InequalityReport> verifyOpial(const Experiment& ex, const IdentityReport& id) {
  const double tol = ex.residualTolerance();
  std::vector<InequalityReport> out;
  std::string noteHt0;
  const bool dirichlet = htildeVanishesOnBoundary(ex, noteHt0);
  const GhcInfo ch = weightScaleConstant(ex);
  const PoincareBound cp = poincareConstant(ex.domain);

  if (!dirichlet || !ch.ok) {
    InequalityReport r;
    r.name = "opial";
    r.applicable = false;
    if (!dirichlet) r.messages.push_back("Htilde(u) does not vanish on the boundary: " + noteHt0);
    if (!ch.ok) r.messages.push_back("weight-scale constant unbounded: " + ch.provenance);
    out.push_back(std::move(r));
    return out;
  }

  std::map<std::string, ConstantValue> consts;
  consts["C_P"] = {cp.value, cp.provenance};
  consts["C_Htilde"] = {ch.value, ch.provenance};

  {
    InequalityReport r;
    r.name = "opial-T2h";
    r.lhs = id.term_GH;
    r.rhs = cp.value * ch.value * id.opial_mixed;
    r.margin = r.rhs - r.lhs;
    r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    r.constants = consts;
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "opial-mixed";
    const double c = cp.value * ch.value;
    r.lhs = id.opial_mixed;
    r.rhs = c * c * id.opial_grad2h;
    r.margin = r.rhs - r.lhs;
    r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    r.constants = consts;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<InequalityReport> verifySimplified(const Experiment& ex, const IdentityReport& id) {
  const OperatorConstants oc = operatorConstants(ex.A, ex.domain, ex.constantSamples);
  const double tol = ex.residualTolerance();
  std::vector<InequalityReport> out;

  std::string noteHt0;
  const bool dirichlet = htildeVanishesOnBoundary(ex, noteHt0);
  const GhcInfo ch = weightScaleConstant(ex);
  const PoincareBound cp = poincareConstant(ex.domain);

  if (!dirichlet || !ch.ok) {
    InequalityReport r;
    r.name = "gh-bound";
    r.applicable = false;
    if (!dirichlet) r.messages.push_back("Htilde(u) does not vanish on the boundary: " + noteHt0);
    if (!ch.ok) r.messages.push_back("weight-scale constant unbounded: " + ch.provenance);
    out.push_back(std::move(r));
    return out;
  }

  const double Gamma = std::pow(cp.value * ch.value, 3) / oc.cA;
  const double kappa = oc.divSup * cp.value * cp.value * ch.value * ch.value / oc.cA;

  std::map<std::string, ConstantValue> consts;
  consts["C_P"] = {cp.value, cp.provenance};
  consts["C_Htilde"] = {ch.value, ch.provenance};
  consts["c_A"] = {oc.cA, oc.cProvenance};
  consts["Gamma"] = {Gamma, "c_A^{-1} C_P^3 C_Htilde^3"};
  consts["kappa"] = {kappa, "|div A|_inf c_A^{-1} C_P^2 C_Htilde^2; div sup: " +
                                oc.divProvenance};

  {
    InequalityReport r;
    r.name = "gh-bound";
    r.lhs = id.term_GH;
    r.rhs = Gamma * id.term_I2;
    r.margin = r.rhs - r.lhs;
    r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    r.constants = consts;
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "simplified-energy";
    r.constants = consts;
    if (oc.divFree) {
      r.applicable = false;
      r.messages.push_back("kappa = 0 (div A vanishes); the case requires 0 < kappa < 1");
    } else if (kappa >= 1.0) {
      r.applicable = false;
      r.messages.push_back("kappa = " + std::to_string(kappa) + " >= 1; bound not applicable");
    } else {
      r.lhs = id.term_I2;
      r.rhs = (id.term_Jabs + id.theta) / (1.0 - kappa);
      r.margin = r.rhs - r.lhs;
      r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<InequalityReport> verifyChainRuleBound(const Experiment& ex,
                                                   const IdentityReport& id) {
  const OperatorConstants oc = operatorConstants(ex.A, ex.domain, ex.constantSamples);
  const double tol = ex.residualTolerance();
  std::vector<InequalityReport> out;

  std::string noteHt0, noteHtPos;
  const bool dirichlet = htildeVanishesOnBoundary(ex, noteHt0);
  const bool nonneg = htildeNonNegative(ex, noteHtPos);
  const GhcInfo ch = weightScaleConstant(ex);
  const PoincareBound cp = poincareConstant(ex.domain);

  const bool signRoute = oc.a2Holds && dirichlet && nonneg;
  double kappa = kInf;
  if (ch.ok) kappa = oc.divSup * cp.value * cp.value * ch.value * ch.value / oc.cA;
  const bool kappaRoute = dirichlet && ch.ok && kappa < 1.0;

  if (!signRoute && !kappaRoute) {
    InequalityReport r;
    r.name = "chain-domination";
    r.applicable = false;
    r.messages.push_back("no simplification route applicable (sign conditions and kappa < 1 both fail)");
    out.push_back(std::move(r));
    return out;
  }

  const double effective = id.term_Jabs > 0 ? id.term_PHtAbs / id.term_Jabs : 0.0;
  double boundC = kInf;
  std::string route;
  if (signRoute) {
    boundC = 2.0;
    route = "sign-condition route, constant 2";
  }
  if (kappaRoute) {
    const double c = 1.0 + 1.0 / (1.0 - kappa);
    if (c < boundC) {
      boundC = c;
      route = "kappa route, constant 1 + 1/(1-kappa)";
    }
  }

  {
    InequalityReport r;
    r.name = "chain-triangle";
    r.lhs = id.term_PHtAbs;
    r.rhs = id.term_Jabs + id.term_I2;
    r.margin = r.rhs - r.lhs;
    r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "chain-domination";
    r.lhs = id.term_PHtAbs;
    r.rhs = boundC * id.term_Jabs;
    r.margin = r.rhs - r.lhs;
    r.holds = r.margin >= -tol * relScale(r.lhs, r.rhs);
    r.constants["effective_constant"] = {effective, "int|P(Htilde(u))| / int|H(u) Pu|"};
    r.constants["bound_constant"] = {boundC, route};
    out.push_back(std::move(r));
  }
  return out;
}

IdentityReport verifyMetafuneSpina(const Domain& dom, const TestFunction& u, double p,
                                   const std::optional<Expr>& g, const QuadSpec& quad,
                                   const Tolerances& tol) {
  if (!(p > 1.0)) throw DomainError("Metafune-Spina identity requires p > 1");
  IdentityReport rep;
  rep.name = "metafune";

  // compact-support surrogate: the data must vanish on the boundary
  {
    const QuadratureRule b = boundaryRule(dom, 4);
    double worst = 0.0;
    for (const Vec& x : b.nodes) worst = std::max(worst, std::abs(u.value(x)));
    if (worst > 1e-10) {
      rep.applicable = false;
      rep.messages.push_back("support reaches the boundary: max |u| on boundary = " +
                             std::to_string(worst));
      return rep;
    }
  }

  std::optional<Expr> gd;
  if (g) gd = g->derivative(0);

  std::vector<double> rels;
  for (int L : quad.levels) {
    const QuadratureRule rule = interiorRule(dom, L, 1.0);
    const std::size_t N = rule.size();
    std::vector<double> lhsTerms(N), rhsTerms(N);
    parallelFor(N, [&](std::size_t i) {
      const Vec& x = rule.nodes[i];
      const double w = rule.weights[i];
      const Jet J = u.jet(x);
      const double gu = g ? g->eval1(J.value) : J.value;
      const double gstar = g ? gd->eval1(J.value) : 1.0;
      const double lap = J.laplacian();
      if (gu == 0.0) {
        lhsTerms[i] = 0.0;
        rhsTerms[i] = 0.0;
        return;
      }
      const double weight = std::pow(std::abs(gu), p - 2.0);
      lhsTerms[i] = w * gu * weight * lap;
      rhsTerms[i] = w * (-(p - 1.0)) * J.grad.norm2() * gstar * weight;
    });
    for (std::size_t i = 0; i < N; ++i)
      if (!std::isfinite(lhsTerms[i]) || !std::isfinite(rhsTerms[i]))
        throw NonFiniteIntegrandError(i, rule.nodes[i].str());
    const double lhs = pairwiseSum(lhsTerms.data(), N);
    const double rhs = pairwiseSum(rhsTerms.data(), N);
    const double res = std::abs(lhs - rhs);
    const double rel = res / relScale(lhs, rhs);
    LevelRow row;
    row.level = L;
    row.terms = {{"lhs", lhs}, {"rhs", rhs}, {"residual", res}, {"relative_residual", rel}};
    rep.levels.push_back(std::move(row));
    rels.push_back(rel);
    rep.term_JP = lhs;
    rep.term_I2 = rhs;
    rep.residual = res;
    rep.relative_residual = rel;
    rep.quadrature_level = L;
  }
  bool ok = rels.size() >= 3;
  if (ok)
    for (std::size_t k = rels.size() - 3; k < rels.size(); ++k) ok &= rels[k] <= tol.smooth;
  // short level lists: accept the final residual against the tolerance
  if (rels.size() < 3) ok = !rels.empty() && rels.back() <= tol.smooth;
  rep.converged = ok;
  rep.constants["p"] = {p, "exponent"};
  if (g) rep.messages.push_back("composition map g = " + g->text());
  return rep;
}

TraceConstancyReport verifyTraceConstancy(const Experiment& ex, int boundaryPoints,
                                          const std::vector<double>& radii) {
  TraceConstancyReport rep;
  if (radii.size() < 2) throw DomainError("trace constancy needs at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw DomainError("radii must decrease");

  std::string note;
  if (!htildeVanishesOnBoundary(ex, note)) {
    rep.applicable = false;
    rep.messages.push_back("Htilde(u) does not vanish on the boundary: " + note);
    return rep;
  }

  const QuadratureRule b = boundaryRule(ex.domain, 3);
  auto uval = [&](const Vec& y) { return ex.u.value(y); };
  std::vector<double> finiteT;
  int divergingCount = 0;
  for (int k = 0; k < boundaryPoints; ++k) {
    const std::size_t idx = k * b.size() / boundaryPoints;
    // a non-integrable trace shows up as clipped averages that keep growing
    // with the cutoff: the mass above the cutoff never becomes negligible
    std::vector<double> probe;
    for (double cap : {1e1, 1e2, 1e3, 1e4}) {
      auto clipped = [&uval, cap](const Vec& y) { return std::min(uval(y), cap); };
      probe.push_back(shellAverages(clipped, ex.domain, b.nodes[idx], {radii.front()}, 128)[0]);
    }
    const Trend resTrend = classifySequence(probe, 1e-3);
    const auto avgs = shellAverages(uval, ex.domain, b.nodes[idx], radii, 64);
    LevelRow row;
    row.level = k;
    for (std::size_t j = 0; j < avgs.size(); ++j)
      row.terms.emplace_back("avg_r" + std::to_string(j), avgs[j]);
    if (resTrend.diverging) {
      ++divergingCount;
      row.terms.emplace_back("trace", kInf);
    } else {
      const std::size_t m = avgs.size();
      const double r1 = radii[m - 2], r2 = radii[m - 1];
      const double T = avgs[m - 1] + (avgs[m - 1] - avgs[m - 2]) * r2 / (r1 - r2);
      finiteT.push_back(T);
      row.terms.emplace_back("trace", T);
    }
    rep.perPoint.push_back(std::move(row));
  }

  if (divergingCount == boundaryPoints) {
    rep.infinite = true;
    rep.holds = true;
    rep.T = ex.weight.B();
    rep.messages.push_back("shell averages diverge at every sampled point: common trace at B");
    return rep;
  }
  if (divergingCount > 0) {
    rep.holds = false;
    rep.messages.push_back("mixed behaviour: some points diverge, some settle");
    return rep;
  }
  const auto [lo, hi] = std::minmax_element(finiteT.begin(), finiteT.end());
  rep.spread = *hi - *lo;
  rep.T = 0.5 * (*hi + *lo);
  const double B = ex.weight.B();
  const bool inRange = rep.T >= -ex.tol.trace && (B == kInf || rep.T <= B + ex.tol.trace);
  rep.holds = rep.spread <= ex.tol.trace * (1.0 + std::abs(rep.T)) && inRange;
  return rep;
}

TangentialReport verifyTangentialGradient(const TestFunction& v, const Domain& dom, int level,
                                          double tol) {
  TangentialReport rep;
  const QuadratureRule b = boundaryRule(dom, level);
  double maxGrad = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vec& x = b.nodes[i];
    rep.maxBoundaryValue = std::max(rep.maxBoundaryValue, std::abs(v.value(x)));
    const Jet J = v.jet(x);
    const Vec tang = J.grad - J.grad.dot(b.normals[i]) * b.normals[i];
    rep.maxTangential = std::max(rep.maxTangential, tang.norm());
    maxGrad = std::max(maxGrad, J.grad.norm());
  }
  if (rep.maxBoundaryValue > 1e-10) {
    rep.applicable = false;
    rep.messages.push_back("v does not vanish on the boundary (max |v| = " +
                           std::to_string(rep.maxBoundaryValue) + ")");
    return rep;
  }
  rep.holds = rep.maxTangential <= tol * (1.0 + maxGrad);
  return rep;
}

PointwiseReport verifyPointwiseIdentity(const Experiment& ex, int npoints, double tol) {
  PointwiseReport rep;
  std::mt19937_64 rng(ex.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double B = ex.weight.B();
  const Domain& dom = ex.domain;
  const double diam = dom.diameter();

  auto composition = [&](const Vec& y) { return ex.weight.Htilde(ex.u.value(y)); };

  int accepted = 0, attempts = 0;
  double maxRel = 0.0;
  while (accepted < npoints && attempts < 200 * npoints) {
    ++attempts;
    Vec x(dom.dim());
    if (dom.kind() == Domain::Kind::Ball) {
      Vec dir(dom.dim());
      double nrm = 0.0;
      do {
        for (int i = 0; i < dom.dim(); ++i) dir[i] = 2.0 * unif(rng) - 1.0;
        nrm = dir.norm();
      } while (nrm > 1.0 || nrm < 1e-6);
      const double r = 0.8 * dom.radius() * std::pow(unif(rng), 1.0 / dom.dim());
      x = dom.center() + (r / nrm) * dir;
    } else {
      for (int i = 0; i < dom.dim(); ++i) {
        const double w = dom.hi()[i] - dom.lo()[i];
        x[i] = dom.lo()[i] + w * (0.1 + 0.8 * unif(rng));
      }
    }
    const double clearance = std::min(ex.u.smoothnessClearance(x), dom.boundaryDistance(x));
    // stay away from singular points and the boundary: high-order finite
    // differences need room for the stencil and bounded sixth derivatives
    if (clearance < 0.075 * diam) continue;
    const double h = std::min(1e-3 * (1.0 + diam), clearance / 24.0);
    // the whole stencil must stay inside {u in (0,B)}
    bool stencilOk = true;
    for (int i = 0; i < dom.dim() && stencilOk; ++i) {
      for (double s : {-2.0 * h, 0.0, 2.0 * h}) {
        Vec y = x;
        y[i] += s;
        const double v = ex.u.value(y);
        if (!(v > 0.0 && v < B)) {
          stencilOk = false;
          break;
        }
      }
    }
    if (!stencilOk) continue;

    const Mat fdH = fdHessian4(composition, x, h);
    const double lhs = ex.A.value(x).frobenius(fdH);
    const Jet J = ex.u.jet(x);
    const TripleValues tv = ex.weight.eval(J.value);
    const double rhs = tv.h * ex.A.aNormSq(x, J.grad) + tv.H * ex.A.applyP(x, J.hess);
    const double rel = std::abs(lhs - rhs) / relScale(lhs, rhs);
    maxRel = std::max(maxRel, rel);
    ++accepted;
  }
  rep.points = accepted;
  rep.maxRelError = maxRel;
  rep.holds = accepted == npoints && maxRel <= tol;
  if (accepted < npoints)
    rep.messages.push_back("only " + std::to_string(accepted) + " admissible points found");
  return rep;
}

}  // namespace soblab
