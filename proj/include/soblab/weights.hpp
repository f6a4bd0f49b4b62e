#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "soblab/expr.hpp"
#include "soblab/linalg.hpp"

namespace soblab {

enum class WeightFamily { Power, PowerLog, Exponential, Tau, Custom };

/// Which second antiderivative of h is meant. Canonical is the family's
/// natural closed form (for powers it coincides with the Hardy transform when
/// H is integrable near 0 and with the conjugate-Hardy transform otherwise).
struct HtildeNorm {
  enum Kind { Canonical, HardyAtZero, ConjugateHardyAtB, Anchored } kind = Canonical;
  double s0 = 1.0;     // Anchored only
  double value = 0.0;  // Anchored only

  static HtildeNorm canonical() { return {}; }
  static HtildeNorm hardyAtZero() { return {HardyAtZero, 0, 0}; }
  static HtildeNorm conjugateHardyAtB() { return {ConjugateHardyAtB, 0, 0}; }
  static HtildeNorm anchored(double s0, double value) { return {Anchored, s0, value}; }
  std::string str() const;
};

/// Interval to which the second antiderivative extends continuously.
struct IntervalDesc {
  bool closed0 = false;
  bool closedB = false;
  double B = kInf;
  bool indeterminate = false;  // numeric endpoint probe did not settle
  std::string str() const;
};

struct TripleValues {
  double h, H, Htilde;
};

/// Result of estimating the constant in the bound H^2/h <= C |Htilde|.
struct GhcResult {
  std::optional<double> constant;  // empty when the ratio is unbounded
  bool unbounded = false;
  double at = 0.0;  // sample where the supremum (or blow-up) was found
  std::string provenance;
};

/// A principal weight h > 0 on (0,B) together with a fixed antiderivative H
/// (with optional constant offset) and a normalized second antiderivative.
/// Built-in families carry closed forms; tau-generated and custom weights use
/// cached adaptive quadrature for their antiderivatives. Immutable and safe
/// to share across threads.
class WeightTriple {
 public:
  static WeightTriple power(double alpha, double B = kInf,
                            HtildeNorm norm = HtildeNorm::canonical(), double offset = 0.0);
  static WeightTriple powerLog(double alpha, double beta, double B = kInf,
                               HtildeNorm norm = HtildeNorm::canonical(), double offset = 0.0);
  static WeightTriple exponential(double beta, double alpha = 1.0, double B = kInf,
                                  HtildeNorm norm = HtildeNorm::canonical(),
                                  double offset = 0.0);
  /// Builds H = exp(beta) with beta' = 1/tau and beta(anchor) = 0, so that
  /// the ratio H/h equals tau exactly.
  static WeightTriple fromTau(Expr tau, double anchor, double B = kInf,
                              HtildeNorm norm = HtildeNorm::canonical());
  static WeightTriple custom(Expr h, double B = kInf,
                             HtildeNorm norm = HtildeNorm::canonical(), double offset = 0.0);

  double h(double s) const;
  double H(double s) const;
  double Htilde(double s) const;
  TripleValues eval(double s) const;

  /// H(s)/h(s).
  double transformT(double s) const;
  /// H(s)^2/h(s).
  double transformG(double s) const;

  const IntervalDesc& extensionInterval() const { return interval_; }
  double B() const { return B_; }
  WeightFamily family() const { return family_; }
  double powerAlpha() const { return alpha_; }
  const HtildeNorm& normalization() const { return norm_; }

  /// Empirical least admissible constant for H^2/h <= C|Htilde| over
  /// log-spaced samples of [lo, hi], or "unbounded".
  GhcResult ghcConstant(double lo, double hi, int nsamples = 256) const;

  /// Exact constant where the family admits one (powers, plain exponential).
  std::optional<double> ghcClosedForm() const;

  /// Continuous extension value of Htilde at an endpoint of (0,B), when the
  /// endpoint limit is finite.
  std::optional<double> HtildeEndpoint(bool atB) const;

  std::string describe() const;

  /// Replaces the normalization, keeping h, H and the family fixed.
  WeightTriple withNormalization(HtildeNorm norm) const;

 private:
  WeightTriple() = default;
  void finalize();  // resolves the normalization constant and the interval

  void checkInside(double s) const;
  double hBase(double s) const;
  double HBase(double s) const;       // before the offset
  double HtildeBase(double s) const;  // second antiderivative of h with HtildeBase' = HBase
  /// Limit of HtildeBase(s) - offset*s at an endpoint (0 or B); +-inf allowed.
  double endpointLimit(bool atB, bool& indeterminate) const;

  WeightFamily family_ = WeightFamily::Power;
  double B_ = kInf;
  double offset_ = 0.0;  // H = HBase - offset
  HtildeNorm norm_;
  double normShift_ = 0.0;  // Htilde = HtildeBase - offset*s + normShift
  IntervalDesc interval_;

  // family parameters
  double alpha_ = 0.0, beta_ = 0.0;
  double anchor_ = 1.0;  // tau / custom reference point
  Expr expr_;            // tau(s) or custom h(s)

  // memoized running integrals for the numeric families
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

}  // namespace soblab
