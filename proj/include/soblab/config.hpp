#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soblab/douglas.hpp"
#include "soblab/reports.hpp"
#include "soblab/verifier.hpp"

namespace soblab {

/// One requested check with its expectation and per-check options.
struct CheckSpec {
  std::string name;
  std::string expect;  // empty = default for the check kind
  double p = 2.0;
  std::optional<Expr> g;
};

/// Parsed and validated experiment description. Unknown keys are rejected.
struct ExperimentConfig {
  std::string name;
  std::optional<Domain> domain;
  std::optional<WeightTriple> weight;
  std::optional<TestFunction> function;
  std::optional<MatrixField> op;
  QuadSpec quad;
  Tolerances tol;
  bool restricted = false;
  std::vector<CheckSpec> checks;

  // douglas section
  std::optional<BoundaryData> douglasData;
  double douglasP = 2.0;

  // trace-constancy options
  int tracePoints = 8;
  std::vector<double> traceRadii;

  // pointwise options
  int pointwisePoints = 100;
  double pointwiseTol = 1e-8;

  std::string outputFormat = "json";
  std::string outputPath;

  static ExperimentConfig fromJsonText(const std::string& text, const std::string& name);
  static ExperimentConfig fromFile(const std::string& path);
};

/// Executes every configured check in order. Deterministic for a fixed
/// config: fixed seeds and a fixed reduction order.
RunReport runConfig(const ExperimentConfig& cfg);

/// Per-level table of every term of the config's first identity-type check,
/// with empirical convergence orders (log2 of successive increment ratios).
RunReport convergenceStudy(ExperimentConfig cfg, int minLevel, int maxLevel);

/// Serializes the report (json or csv) to the path; empty path = stdout.
void emitReport(const RunReport& report, const std::string& format, const std::string& path);

std::vector<std::pair<std::string, std::string>> listChecks();
std::vector<std::string> listFamilies();

}  // namespace soblab
