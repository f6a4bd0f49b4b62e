#include "soblab/reports.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace soblab {

Trend classifySequence(const std::vector<double>& v, double relTol) {
  Trend t;
  const std::size_t n = v.size();
  if (n >= 2) t.lastIncrement = std::abs(v[n - 1] - v[n - 2]);
  if (n >= 3) {
    const double scale = std::max(1.0, std::abs(v[n - 1]));
    const double d1 = std::abs(v[n - 1] - v[n - 2]);
    const double d2 = std::abs(v[n - 2] - v[n - 3]);
    t.converged = d1 <= relTol * scale && d2 <= relTol * scale;
  }
  if (n >= 4) {
    bool increasing = true;
    for (std::size_t i = n - 4; i + 1 < n; ++i)
      increasing &= v[i + 1] > v[i] * (1.0 + 1e-12);
    if (increasing) {
      // growing values whose increments do not shrink: slow (algebraic)
      // convergence still has ratios well below 1, genuine divergence >= 1
      const double d1 = v[n - 1] - v[n - 2];
      const double d2 = v[n - 2] - v[n - 3];
      const double d3 = v[n - 3] - v[n - 4];
      const bool sustained = d2 > 0 && d3 > 0 && (d1 / d2 > 0.9) && (d2 / d3 > 0.9);
      t.diverging = sustained || v[n - 1] > 1e12;
    }
  }
  return t;
}

CheckRecord toRecord(const IdentityReport& r) {
  CheckRecord rec;
  rec.name = r.name;
  rec.kind = "identity";
  rec.applicable = r.applicable;
  rec.levels = r.levels;
  rec.diverging = r.diverging;
  rec.ok = r.converged && !r.diverging;
  rec.summary = {{"term_I2", r.term_I2},
                 {"term_JP", r.term_JP},
                 {"term_Jdiv", r.term_Jdiv},
                 {"theta", r.theta},
                 {"residual", r.residual},
                 {"relative_residual", r.relative_residual},
                 {"quadrature_level", static_cast<double>(r.quadrature_level)},
                 {"converged", r.converged ? 1.0 : 0.0}};
  rec.constants = r.constants;
  rec.messages = r.hypothesis_notes;
  rec.messages.insert(rec.messages.end(), r.messages.begin(), r.messages.end());
  if (!r.applicable)
    rec.outcome = "not-applicable";
  else if (r.diverging)
    rec.outcome = "diverged";
  else
    rec.outcome = r.converged ? "converged" : "failed";
  if (!r.divergent_term.empty()) rec.messages.push_back("divergent term: " + r.divergent_term);
  return rec;
}

CheckRecord toRecord(const std::string& checkName, const std::vector<InequalityReport>& rs,
                     const std::vector<LevelRow>& levels) {
  CheckRecord rec;
  rec.name = checkName;
  rec.kind = "inequality";
  rec.levels = levels;
  bool anyApplicable = false, allHold = true;
  for (const auto& r : rs) {
    if (!r.applicable) {
      for (const auto& m : r.messages) rec.messages.push_back(r.name + ": " + m);
      continue;
    }
    anyApplicable = true;
    allHold &= r.holds;
    rec.summary.emplace_back(r.name + ".lhs", r.lhs);
    rec.summary.emplace_back(r.name + ".rhs", r.rhs);
    rec.summary.emplace_back(r.name + ".margin", r.margin);
    for (const auto& [k, c] : r.constants) rec.constants[k] = c;
    for (const auto& m : r.messages) rec.messages.push_back(r.name + ": " + m);
  }
  rec.applicable = anyApplicable;
  rec.ok = anyApplicable && allHold;
  rec.outcome = !anyApplicable ? "not-applicable" : (allHold ? "held" : "failed");
  return rec;
}

void applyExpectation(CheckRecord& rec, const std::string& expect) {
  rec.expect = expect;
  if (expect == "diverge")
    rec.passed = rec.outcome == "diverged";
  else if (expect == "not-applicable")
    rec.passed = rec.outcome == "not-applicable";
  else  // converge / hold
    rec.passed = rec.outcome == "converged" || rec.outcome == "held";
}

namespace {
using ordered_json = nlohmann::ordered_json;

ordered_json constantsJson(const std::map<std::string, ConstantValue>& cs) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, c] : cs) {
    j[k] = {{"value", c.value}, {"provenance", c.provenance}};
  }
  return j;
}
}  // namespace

std::string toJson(const RunReport& report) {
  ordered_json root;
  root["config"] = report.config_name;
  root["suite_verdict"] = report.suite_pass ? "pass" : "fail";
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = c.kind;
    jc["applicable"] = c.applicable;
    jc["outcome"] = c.outcome;
    jc["expect"] = c.expect;
    jc["passed"] = c.passed;
    ordered_json levels = ordered_json::array();
    for (const auto& row : c.levels) {
      ordered_json jr;
      jr["level"] = row.level;
      ordered_json terms = ordered_json::object();
      for (const auto& [k, v] : row.terms) terms[k] = v;
      jr["terms"] = terms;
      levels.push_back(jr);
    }
    jc["levels"] = levels;
    ordered_json summary = ordered_json::object();
    for (const auto& [k, v] : c.summary) summary[k] = v;
    jc["summary"] = summary;
    jc["constants"] = constantsJson(c.constants);
    jc["messages"] = c.messages;
    checks.push_back(jc);
  }
  root["checks"] = checks;
  return root.dump(2) + "\n";
}

std::string toCsv(const RunReport& report) {
  std::string out = "check,level,term,value\n";
  char buf[64];
  auto addRow = [&out, &buf](const std::string& check, int level, const std::string& term,
                             double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out += check + "," + std::to_string(level) + "," + term + "," + buf + "\n";
  };
  for (const auto& c : report.checks) {
    for (const auto& row : c.levels)
      for (const auto& [k, v] : row.terms) addRow(c.name, row.level, k, v);
    const int summaryLevel = c.levels.empty() ? 0 : c.levels.back().level;
    for (const auto& [k, v] : c.summary) addRow(c.name, summaryLevel, "summary." + k, v);
  }
  return out;
}

}  // namespace soblab
