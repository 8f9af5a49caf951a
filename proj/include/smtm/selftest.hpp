#pragma once

// Acceptance criteria 1-10. Each check runs at a fixed seed with its
// tolerance and runtime budget pinned in code, and reports one line.

#include <string>

namespace smtm {

inline constexpr int kCriterionCount = 10;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  /// Measured quantities next to their thresholds.
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// Throws InvalidArgument unless 1 <= id <= kCriterionCount.
CriterionResult run_criterion(int id);

/// "criterion 4 PASS: <title>: <detail> [12.3 s / 120 s]"
std::string format_result(const CriterionResult& r);

}  // namespace smtm
