#include "soblab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <vector>

#include "soblab/gauss.hpp"

namespace soblab {

namespace {

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Running integral from a fixed anchor, memoized on a coarse grid so the
/// value at any point is independent of query order.
class ChainedIntegral {
 public:
  ChainedIntegral(std::function<double(double)> g, double anchor, double lower_bound)
      : g_(std::move(g)), anchor_(anchor) {
    min_k_ = 0;
    if (lower_bound < anchor_) {
      while (anchor_ + (min_k_ - 1) * kStep > lower_bound + 0.25 * kStep) --min_k_;
    }
  }

  double operator()(double s) const {
    long long k;
    if (s >= anchor_) {
      k = static_cast<long long>(std::floor((s - anchor_) / kStep));
    } else {
      k = -static_cast<long long>(std::floor((anchor_ - s) / kStep));
      k = std::max(k, min_k_);
    }
    const double gp = anchor_ + k * kStep;
    return gridValue(k) + adaptiveIntegrate(g_, gp, s, 1e-10, 1e-14);
  }

 private:
  static constexpr double kStep = 0.25;

  double gridValue(long long k) const {
    if (k == 0) return 0.0;
    // walk from the nearest memoized point toward k, panel by panel
    const long long dir = k > 0 ? 1 : -1;
    long long at = 0;
    double val = 0.0;
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (long long j = k; j != 0; j -= dir) {
        auto it = memo_.find(j);
        if (it != memo_.end()) {
          at = j;
          val = it->second;
          break;
        }
      }
    }
    while (at != k) {
      const long long next = at + dir;
      val += adaptiveIntegrate(g_, anchor_ + at * kStep, anchor_ + next * kStep, 1e-10, 1e-14);
      at = next;
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(at);
      if (it != memo_.end())
        val = it->second;  // another thread got here first; keep its value
      else
        memo_.emplace(at, val);
    }
    return val;
  }

  std::function<double(double)> g_;
  double anchor_;
  long long min_k_;
  mutable std::mutex mu_;
  mutable std::map<long long, double> memo_;
};

}  // namespace

struct WeightTriple::Cache {
  std::shared_ptr<ChainedIntegral> beta;     // tau: integral of 1/tau
  std::shared_ptr<ChainedIntegral> Hnum;     // custom: integral of h
  std::shared_ptr<ChainedIntegral> Htilde;   // numeric families: integral of HBase
};

std::string HtildeNorm::str() const {
  switch (kind) {
    case Canonical:
      return "canonical";
    case HardyAtZero:
      return "hardy-at-0";
    case ConjugateHardyAtB:
      return "conjugate-hardy-at-B";
    case Anchored:
      return "anchored(" + fmt(s0) + ", " + fmt(value) + ")";
  }
  return "?";
}

std::string IntervalDesc::str() const {
  std::string s = closed0 ? "[0, " : "(0, ";
  s += fmt(B);
  s += closedB ? "]" : ")";
  if (indeterminate) s += " (indeterminate endpoint)";
  return s;
}

void WeightTriple::checkInside(double s) const {
  if (!(s > 0.0) || !(s < B_))
    throw DomainError("weight evaluated at s=" + fmt(s) + " outside (0, " + fmt(B_) + ")");
}

double WeightTriple::hBase(double s) const {
  switch (family_) {
    case WeightFamily::Power:
      return std::pow(s, alpha_);
    case WeightFamily::PowerLog: {
      const double L = std::log(std::numbers::e + s);
      return (alpha_ + 1.0) * std::pow(s, alpha_) * std::pow(L, beta_) +
             beta_ * std::pow(s, alpha_ + 1.0) * std::pow(L, beta_ - 1.0) / (std::numbers::e + s);
    }
    case WeightFamily::Exponential: {
      const double E = std::exp(beta_ * std::pow(s, alpha_));
      return alpha_ * beta_ * std::pow(s, alpha_ - 2.0) * E *
             ((alpha_ - 1.0) + alpha_ * beta_ * std::pow(s, alpha_));
    }
    case WeightFamily::Tau:
      return HBase(s) / expr_.eval1(s);
    case WeightFamily::Custom:
      return expr_.eval1(s);
  }
  return 0.0;
}

double WeightTriple::HBase(double s) const {
  switch (family_) {
    case WeightFamily::Power:
      return alpha_ == -1.0 ? std::log(s) : std::pow(s, alpha_ + 1.0) / (alpha_ + 1.0);
    case WeightFamily::PowerLog:
      return std::pow(s, alpha_ + 1.0) * std::pow(std::log(std::numbers::e + s), beta_);
    case WeightFamily::Exponential:
      return alpha_ * beta_ * std::pow(s, alpha_ - 1.0) * std::exp(beta_ * std::pow(s, alpha_));
    case WeightFamily::Tau:
      return std::exp((*cache_->beta)(s));
    case WeightFamily::Custom:
      return (*cache_->Hnum)(s);
  }
  return 0.0;
}

double WeightTriple::HtildeBase(double s) const {
  switch (family_) {
    case WeightFamily::Power:
      if (alpha_ == -1.0) return s * std::log(s) - s;
      if (alpha_ == -2.0) return -std::log(s);
      return std::pow(s, alpha_ + 2.0) / ((alpha_ + 1.0) * (alpha_ + 2.0));
    case WeightFamily::Exponential:
      return std::exp(beta_ * std::pow(s, alpha_));
    case WeightFamily::PowerLog:
    case WeightFamily::Tau:
    case WeightFamily::Custom:
      return (*cache_->Htilde)(s);
  }
  return 0.0;
}

double WeightTriple::endpointLimit(bool atB, bool& indeterminate) const {
  indeterminate = false;
  switch (family_) {
    case WeightFamily::Power: {
      if (!atB) {
        if (alpha_ > -2.0) return 0.0;
        return kInf;  // -2: -log s -> +inf; < -2: positive coefficient power blow-up
      }
      if (B_ < kInf) return HtildeBase(B_) - offset_ * B_;
      if (alpha_ < -2.0 && offset_ == 0.0) return 0.0;
      return kInf;
    }
    case WeightFamily::PowerLog: {
      if (!atB) return 0.0;  // alpha > -1, integrand continuous at 0
      if (B_ < kInf) return HtildeBase(B_) - offset_ * B_;
      return kInf;
    }
    case WeightFamily::Exponential: {
      if (!atB) return 1.0;
      if (B_ < kInf) return HtildeBase(B_) - offset_ * B_;
      if (beta_ < 0.0 && offset_ == 0.0) return 0.0;
      return kInf;
    }
    case WeightFamily::Tau:
    case WeightFamily::Custom: {
      if (atB && B_ == kInf) return kInf;  // generic growth; exotic decay is not modelled
      // monotone numeric probe toward the endpoint
      const double ref = std::min(anchor_, B_ < kInf ? 0.5 * (anchor_ + B_) : anchor_);
      double prev = 0.0;
      bool have_prev = false;
      for (int k = 1; k <= 14; ++k) {
        const double t = std::pow(0.25, k);
        const double s = atB ? B_ - (B_ - ref) * t : ref * t;
        double v;
        try {
          v = HtildeBase(s) - offset_ * s;
        } catch (const EvaluationError&) {
          indeterminate = true;
          return std::numeric_limits<double>::quiet_NaN();
        }
        if (!std::isfinite(v) || std::abs(v) > 1e12) return v > 0 ? kInf : -kInf;
        if (have_prev && std::abs(v - prev) <= 1e-9 * (1.0 + std::abs(v))) return v;
        prev = v;
        have_prev = true;
      }
      indeterminate = true;  // treated as a non-extendable endpoint
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  return kInf;
}

void WeightTriple::finalize() {
  // Resolve the additive constant of the second antiderivative.
  bool ind0 = false, indB = false;
  const double L0 = endpointLimit(false, ind0);
  const double LB = endpointLimit(true, indB);
  HtildeNorm norm = norm_;
  switch (norm.kind) {
    case HtildeNorm::Canonical:
      normShift_ = 0.0;
      break;
    case HtildeNorm::HardyAtZero:
      if (!std::isfinite(L0))
        throw DomainError("hardy-at-0 normalization unavailable: antiderivative diverges at 0");
      normShift_ = -L0;
      break;
    case HtildeNorm::ConjugateHardyAtB:
      if (!std::isfinite(LB))
        throw DomainError(
            "conjugate-hardy-at-B normalization unavailable: antiderivative diverges at B");
      normShift_ = -LB;
      break;
    case HtildeNorm::Anchored: {
      double at;
      if (norm.s0 == 0.0) {
        if (!std::isfinite(L0)) throw DomainError("anchor at 0 unavailable");
        at = L0;
      } else if (norm.s0 == B_) {
        if (!std::isfinite(LB)) throw DomainError("anchor at B unavailable");
        at = LB;
      } else {
        if (!(norm.s0 > 0.0 && norm.s0 < B_)) throw DomainError("anchor point outside [0, B]");
        at = HtildeBase(norm.s0) - offset_ * norm.s0;
      }
      normShift_ = norm.value - at;
      break;
    }
  }
  interval_.B = B_;
  interval_.closed0 = std::isfinite(L0);
  interval_.closedB = (B_ < kInf) && std::isfinite(LB);
  interval_.indeterminate = ind0 || indB;
}

WeightTriple WeightTriple::power(double alpha, double B, HtildeNorm norm, double offset) {
  if (!(B > 0.0)) throw DomainError("B must be positive");
  WeightTriple w;
  w.family_ = WeightFamily::Power;
  w.alpha_ = alpha;
  w.B_ = B;
  w.offset_ = offset;
  w.norm_ = norm;
  w.finalize();
  return w;
}

WeightTriple WeightTriple::powerLog(double alpha, double beta, double B, HtildeNorm norm,
                                    double offset) {
  if (!(B > 0.0)) throw DomainError("B must be positive");
  if (!(alpha > -1.0)) throw DomainError("power-log family requires alpha > -1");
  if (beta == 0.0) throw DomainError("power-log family requires beta != 0");
  WeightTriple w;
  w.family_ = WeightFamily::PowerLog;
  w.alpha_ = alpha;
  w.beta_ = beta;
  w.B_ = B;
  w.offset_ = offset;
  w.norm_ = norm;
  w.anchor_ = 0.0;
  w.cache_ = std::make_shared<Cache>();
  const double a = alpha, b = beta;
  auto Hfn = [a, b](double s) {
    return std::pow(s, a + 1.0) * std::pow(std::log(std::numbers::e + s), b);
  };
  w.cache_->Htilde = std::make_shared<ChainedIntegral>(Hfn, 0.0, 0.0);
  // positivity probe for h
  for (int i = 0; i < 64; ++i) {
    const double hi = std::min(B, 100.0);
    const double s = std::exp(std::log(1e-6) + i / 63.0 * (std::log(hi) - std::log(1e-6)));
    if (s >= B) continue;
    if (!(w.hBase(s) > 0.0))
      throw DomainError("power-log parameters give a non-positive weight at s=" + fmt(s));
  }
  w.finalize();
  return w;
}

WeightTriple WeightTriple::exponential(double beta, double alpha, double B, HtildeNorm norm,
                                       double offset) {
  if (!(B > 0.0)) throw DomainError("B must be positive");
  if (beta == 0.0) throw DomainError("exponential family requires beta != 0");
  if (alpha < 1.0) throw DomainError("exponential family requires alpha >= 1");
  if (alpha != 1.0 && beta <= 0.0)
    throw DomainError("exponential family with alpha > 1 requires beta > 0");
  WeightTriple w;
  w.family_ = WeightFamily::Exponential;
  w.alpha_ = alpha;
  w.beta_ = beta;
  w.B_ = B;
  w.offset_ = offset;
  w.norm_ = norm;
  w.finalize();
  return w;
}

WeightTriple WeightTriple::fromTau(Expr tau, double anchor, double B, HtildeNorm norm) {
  if (!(B > 0.0)) throw DomainError("B must be positive");
  if (!(anchor > 0.0 && anchor < B)) throw DomainError("tau anchor must lie in (0, B)");
  WeightTriple w;
  w.family_ = WeightFamily::Tau;
  w.B_ = B;
  w.anchor_ = anchor;
  w.norm_ = norm;
  w.expr_ = tau;
  // positivity probe for tau
  for (int i = 0; i < 64; ++i) {
    const double hi = std::min(B, 100.0);
    const double s = std::exp(std::log(1e-6) + i / 63.0 * (std::log(hi) - std::log(1e-6)));
    if (s >= B) continue;
    if (!(tau.eval1(s) > 0.0))
      throw DomainError("tau must be positive on (0, B); failed at s=" + fmt(s));
  }
  w.cache_ = std::make_shared<Cache>();
  Expr tcopy = tau;
  w.cache_->beta =
      std::make_shared<ChainedIntegral>([tcopy](double s) { return 1.0 / tcopy.eval1(s); },
                                        anchor, 0.0);
  auto betaInt = w.cache_->beta;
  w.cache_->Htilde = std::make_shared<ChainedIntegral>(
      [betaInt](double s) { return std::exp((*betaInt)(s)); }, anchor, 0.0);
  w.finalize();
  return w;
}

WeightTriple WeightTriple::custom(Expr h, double B, HtildeNorm norm, double offset) {
  if (!(B > 0.0)) throw DomainError("B must be positive");
  WeightTriple w;
  w.family_ = WeightFamily::Custom;
  w.B_ = B;
  w.offset_ = offset;
  w.norm_ = norm;
  w.expr_ = h;
  w.anchor_ = std::min(1.0, 0.5 * B);
  for (int i = 0; i < 64; ++i) {
    const double hi = std::min(B, 100.0);
    const double s = std::exp(std::log(1e-6) + i / 63.0 * (std::log(hi) - std::log(1e-6)));
    if (s >= B) continue;
    if (!(h.eval1(s) > 0.0))
      throw DomainError("custom weight must be positive on (0, B); failed at s=" + fmt(s));
  }
  w.cache_ = std::make_shared<Cache>();
  Expr hcopy = h;
  auto hfn = [hcopy](double s) { return hcopy.eval1(s); };
  // anchor the antiderivative at 0 when h is integrable there, so the offset
  // keeps its meaning as the constant subtracted from the Hardy transform
  double hAnchor = w.anchor_;
  try {
    (void)adaptiveIntegrate(hfn, 0.0, w.anchor_, 1e-8, 1e-12);
    hAnchor = 0.0;
  } catch (const EvaluationError&) {
  }
  w.cache_->Hnum = std::make_shared<ChainedIntegral>(hfn, hAnchor, 0.0);
  auto Hn = w.cache_->Hnum;
  w.cache_->Htilde = std::make_shared<ChainedIntegral>(
      [Hn](double s) { return (*Hn)(s); }, w.anchor_, 0.0);
  w.finalize();
  return w;
}

double WeightTriple::h(double s) const {
  checkInside(s);
  const double v = hBase(s);
  if (!(v > 0.0)) throw EvaluationError("weight h non-positive at s=" + fmt(s));
  return v;
}

double WeightTriple::H(double s) const {
  checkInside(s);
  return HBase(s) - offset_;
}

double WeightTriple::Htilde(double s) const {
  checkInside(s);
  return HtildeBase(s) - offset_ * s + normShift_;
}

TripleValues WeightTriple::eval(double s) const { return {h(s), H(s), Htilde(s)}; }

double WeightTriple::transformT(double s) const { return H(s) / h(s); }

double WeightTriple::transformG(double s) const {
  const double Hs = H(s);
  return Hs * Hs / h(s);
}

GhcResult WeightTriple::ghcConstant(double lo, double hi, int nsamples) const {
  GhcResult out;
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("ghcConstant: need 0 < lo < hi");
  hi = std::min(hi, B_ * (1.0 - 1e-12));
  const int n = std::max(nsamples, 8);
  std::vector<double> ss(n), ratio(n), ht(n), g(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    ss[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
    g[i] = transformG(ss[i]);
    ht[i] = Htilde(ss[i]);
  }
  // A zero of Htilde where G does not vanish makes the ratio unbounded.
  for (int i = 0; i < n; ++i) {
    const double scale = std::max(1.0, g[i]);
    if (std::abs(ht[i]) < 1e-14 * scale && g[i] > 1e-14) {
      out.unbounded = true;
      out.at = ss[i];
      out.provenance = "ratio unbounded: zero of Htilde at s=" + fmt(ss[i]);
      return out;
    }
    ratio[i] = g[i] / std::abs(ht[i]);
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (ht[i] * ht[i + 1] < 0.0 && std::min(g[i], g[i + 1]) > 1e-14) {
      out.unbounded = true;
      out.at = 0.5 * (ss[i] + ss[i + 1]);
      out.provenance = "ratio unbounded: Htilde changes sign near s=" + fmt(out.at);
      return out;
    }
  }
  int arg = 0;
  for (int i = 1; i < n; ++i)
    if (ratio[i] > ratio[arg]) arg = i;
  const double sup = ratio[arg];
  out.at = ss[arg];
  // Divergence cap: a huge supremum at the edge of the range with positive
  // log-slope over the trailing decade is reported as unbounded.
  const double cap = 1e12;
  if (sup > cap && (arg == 0 || arg == n - 1)) {
    const int w = std::max(2, n / 10);
    bool monotone = true;
    if (arg == n - 1) {
      for (int i = n - w; i + 1 < n; ++i) monotone &= ratio[i + 1] > ratio[i];
    } else {
      for (int i = 0; i + 1 < w; ++i) monotone &= ratio[i] > ratio[i + 1];
    }
    if (monotone) {
      out.unbounded = true;
      out.provenance = "ratio exceeds cap 1e12 with monotone growth toward s=" + fmt(out.at);
      return out;
    }
  }
  out.constant = sup;
  out.provenance = "empirical sup of G_H/|Htilde| over " + std::to_string(n) +
                   " log-spaced samples in [" + fmt(lo) + ", " + fmt(hi) + "]";
  return out;
}

std::optional<double> WeightTriple::HtildeEndpoint(bool atB) const {
  bool indeterminate = false;
  const double L = endpointLimit(atB, indeterminate);
  if (indeterminate || !std::isfinite(L)) return std::nullopt;
  return L + normShift_;
}

std::optional<double> WeightTriple::ghcClosedForm() const {
  if (offset_ != 0.0 || norm_.kind != HtildeNorm::Canonical) return std::nullopt;
  if (family_ == WeightFamily::Power && alpha_ != -1.0 && alpha_ != -2.0)
    return std::abs((alpha_ + 2.0) / (alpha_ + 1.0));
  if (family_ == WeightFamily::Exponential && alpha_ == 1.0) return 1.0;
  return std::nullopt;
}

std::string WeightTriple::describe() const {
  std::string s;
  switch (family_) {
    case WeightFamily::Power:
      s = "power(alpha=" + fmt(alpha_) + ")";
      break;
    case WeightFamily::PowerLog:
      s = "power-log(alpha=" + fmt(alpha_) + ", beta=" + fmt(beta_) + ")";
      break;
    case WeightFamily::Exponential:
      s = "exponential(beta=" + fmt(beta_) + ", alpha=" + fmt(alpha_) + ")";
      break;
    case WeightFamily::Tau:
      s = "tau-generated(" + expr_.text() + ", anchor=" + fmt(anchor_) + ")";
      break;
    case WeightFamily::Custom:
      s = "custom(h=" + expr_.text() + ")";
      break;
  }
  s += ", B=" + fmt(B_) + ", norm=" + norm_.str();
  if (offset_ != 0.0) s += ", offset=" + fmt(offset_);
  return s;
}

WeightTriple WeightTriple::withNormalization(HtildeNorm norm) const {
  WeightTriple w = *this;
  w.norm_ = norm;
  w.finalize();
  return w;
}

}  // namespace soblab
