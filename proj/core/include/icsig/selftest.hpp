#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace icsig {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct GoldenOutcome {
  int index = 0;
  std::string kind;
  double objective = 0.0;
  double expected = 0.0;
  double kkt = 0.0;
  bool pass = false;
};

/// Re-solves the stored solver instances and compares objectives against the
/// reference values (1e-5 relative) and KKT residuals (1e-8).
std::vector<GoldenOutcome> run_golden_instances(const nlohmann::json& instances,
                                                const nlohmann::json& golden);

/// Fast oracle suite backing the `verify` command: constellation reference
/// matrices, an analytic-vs-simulated PEP smoke test, the stored solver
/// goldens from `golden_dir`, and alternating-descent checks. `quick` shrinks
/// the Monte Carlo and instance budgets.
std::vector<CheckResult> run_verification(const std::string& golden_dir, bool quick);

}  // namespace icsig
