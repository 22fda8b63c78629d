#pragma once

// Acceptance suite: one randomized, seeded check per criterion. Shared by
// the `selftest` subcommand and the acceptance test binary.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ffsing {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 1);

// Single criterion 1..9; throws BAD_CRITERION otherwise.
CriterionResult run_criterion(int id, std::uint64_t seed = 1);

// "PASS <id> <name>: <detail>" per line.
void print_results(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace ffsing
