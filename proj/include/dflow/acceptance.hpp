#pragma once

// Acceptance criteria for the library, shared by the `dflow verify` command and
// the acceptance test binary. Each criterion is a list of measured checks
// against pinned thresholds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dflow::acceptance {

struct Check {
  std::string label;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string section;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
  /// Check with the largest measured/threshold ratio among failures, or overall.
  const Check* worst() const;
};

struct Options {
  /// Replaces every numeric tolerance when set (structural and statistical checks keep theirs).
  std::optional<double> tolerance;
  /// Runs criteria whose section, name or id matches; empty runs all.
  std::string filter;
  std::uint64_t seed = 20240611;
};

struct CriterionInfo {
  int id;
  const char* name;
  const char* section;
};

const std::vector<CriterionInfo>& criteria();

std::vector<CriterionResult> run(const Options& options);

/// One line per criterion: "[PASS] 01 flow/closed-form-flow ...".
std::string summary_line(const CriterionResult& r);

nlohmann::json report_json(const std::vector<CriterionResult>& results, const Options& options);

}  // namespace dflow::acceptance
