#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scramble::verify {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Criterion numbers with their one-line titles.
const std::vector<std::pair<int, std::string>>& criteria_list();

/// Runs one criterion; exceptions become a failed result with the message.
CriterionResult run_criterion(int id);

/// Runs `ids` (all when empty) and prints one line per criterion as it
/// finishes: "PASS|FAIL <id> <title> (<seconds> s): <detail>".
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, std::ostream& out);

}  // namespace scramble::verify
