#pragma once

#include <string>
#include <vector>

namespace spma {

struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Suites: "bandit", "tabular", "fa", "all".  Throws ConfigError for anything
// else.  Each criterion runs at its pinned tolerance and reports measured
// values alongside its bound.
std::vector<CriterionResult> run_acceptance_suite(const std::string& suite);

bool all_passed(const std::vector<CriterionResult>& results);

std::string format_criterion_line(const CriterionResult& result);

}  // namespace spma
