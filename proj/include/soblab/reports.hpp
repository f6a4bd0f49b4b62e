#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace soblab {

struct ConstantValue {
  double value = 0.0;
  std::string provenance;
};

/// Named numeric terms produced at one quadrature level.
struct LevelRow {
  int level = 0;
  std::vector<std::pair<std::string, double>> terms;
};

/// Convergence classification of a per-level value sequence.
struct Trend {
  bool converged = false;
  bool diverging = false;
  double lastIncrement = 0.0;
};

/// Three-level agreement within relTol declares convergence; four or more
/// strictly growing values with non-shrinking increments declare divergence.
Trend classifySequence(const std::vector<double>& v, double relTol);

/// Per-level identity terms, residuals and hypothesis diagnostics.
struct IdentityReport {
  std::string name = "identity";
  bool applicable = true;
  std::vector<LevelRow> levels;

  double term_I2 = 0.0, term_JP = 0.0, term_Jdiv = 0.0, theta = 0.0;
  double term_Jabs = 0.0, term_GH = 0.0, term_PHtAbs = 0.0;
  double residual = 0.0, relative_residual = 0.0;
  int quadrature_level = 0;
  bool converged = false;

  bool diverging = false;
  std::string divergent_term;
  bool gh_diverging = false;
  std::vector<std::string> hypothesis_notes;
  std::map<std::string, ConstantValue> constants;
  std::vector<std::string> messages;

  // auxiliary final-level integrals feeding the inequality checks
  double opial_mixed = 0.0;   // ∫ |grad u| |T(u)| h(u) (Euclidean norm)
  double opial_grad2h = 0.0;  // ∫ |grad u|^2 h(u) (Euclidean norm)
};

/// One margin check lhs <= rhs with the constants that built the bound.
struct InequalityReport {
  std::string name;
  bool applicable = true;
  double lhs = 0.0, rhs = 0.0, margin = 0.0;
  bool holds = false;
  std::map<std::string, ConstantValue> constants;
  std::vector<std::string> messages;
};

/// Generic record used for serialization and verdicts.
struct CheckRecord {
  std::string name;
  std::string kind;  // identity | inequality | property | study
  bool applicable = true;
  bool ok = false;
  bool diverging = false;
  std::string outcome;  // converged | held | diverged | failed | not-applicable
  std::string expect;
  bool passed = false;
  std::vector<LevelRow> levels;
  std::vector<std::pair<std::string, double>> summary;
  std::map<std::string, ConstantValue> constants;
  std::vector<std::string> messages;
  double wall_ms = 0.0;  // console diagnostics only; never serialized
};

struct RunReport {
  std::string config_name;
  std::vector<CheckRecord> checks;
  bool suite_pass = true;
};

CheckRecord toRecord(const IdentityReport& r);
CheckRecord toRecord(const std::string& checkName, const std::vector<InequalityReport>& rs,
                     const std::vector<LevelRow>& levels = {});

/// Applies the expectation to a record's outcome and sets `passed`.
void applyExpectation(CheckRecord& rec, const std::string& expect);

std::string toJson(const RunReport& report);
std::string toCsv(const RunReport& report);

}  // namespace soblab
