#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "soblab/config.hpp"

namespace {

using namespace soblab;

void printConsoleSummary(const RunReport& report, double wall_ms) {
  std::fprintf(stderr, "== %s ==\n", report.config_name.c_str());
  for (const auto& c : report.checks) {
    std::fprintf(stderr, "  %-24s %-14s expect=%-14s %s\n", c.name.c_str(), c.outcome.c_str(),
                 c.expect.c_str(), c.passed ? "PASS" : "FAIL");
    for (const auto& m : c.messages) std::fprintf(stderr, "      note: %s\n", m.c_str());
  }
  std::fprintf(stderr, "  suite: %s (%.0f ms)\n", report.suite_pass ? "pass" : "fail", wall_ms);
}

int runVerify(const std::string& configPath, std::string outPath, std::string format) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = ExperimentConfig::fromFile(configPath);
  if (format.empty()) format = cfg.outputFormat;
  if (outPath.empty()) outPath = cfg.outputPath;
  const RunReport report = runConfig(cfg);
  emitReport(report, format, outPath);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  printConsoleSummary(report, ms);
  return report.suite_pass ? 0 : 1;
}

int runConverge(const std::string& configPath, int minL, int maxL, std::string outPath,
                std::string format) {
  const ExperimentConfig cfg = ExperimentConfig::fromFile(configPath);
  if (format.empty()) format = cfg.outputFormat;
  if (outPath.empty()) outPath = cfg.outputPath;
  const RunReport report = convergenceStudy(cfg, minL, maxL);
  emitReport(report, format, outPath);
  return report.suite_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soblab: numerical checks of weighted energy identities for\n"
               "non-divergence elliptic operators on model domains"};
  app.require_subcommand(1);

  std::string configPath, outPath, format;
  int minLevel = 3, maxLevel = 7;

  auto* verify = app.add_subcommand("verify", "run every check in a config");
  verify->add_option("--config", configPath, "experiment config (JSON)")->required();
  verify->add_option("--out", outPath, "output path (default: stdout or config output.path)");
  verify->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv", ""}));

  auto* converge = app.add_subcommand("converge", "per-level study with empirical orders");
  converge->add_option("--config", configPath, "experiment config (JSON)")->required();
  converge->add_option("--min-level", minLevel, "first level")->required();
  converge->add_option("--max-level", maxLevel, "last level")->required();
  converge->add_option("--out", outPath, "output path");
  converge->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv", ""}));

  auto* lc = app.add_subcommand("list-checks", "list available check names");
  auto* lf = app.add_subcommand("list-families", "list weight/function/operator families");

  CLI11_PARSE(app, argc, argv);

  try {
    if (lc->parsed()) {
      for (const auto& [name, desc] : soblab::listChecks())
        std::printf("%-22s %s\n", name.c_str(), desc.c_str());
      return 0;
    }
    if (lf->parsed()) {
      for (const auto& f : soblab::listFamilies()) std::printf("%s\n", f.c_str());
      return 0;
    }
    if (verify->parsed()) return runVerify(configPath, outPath, format);
    if (converge->parsed()) return runConverge(configPath, minLevel, maxLevel, outPath, format);
  } catch (const soblab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
