#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freqbin::acceptance {

struct CriterionResult {
  int id{};
  std::string name;
  bool passed{false};
  std::string detail;
};

// Runs the end-to-end verification suite against the built-in profile:
// closed-form metrics, counting statistics, beating round trips,
// physicality grid and energy conservation. Deterministic.
std::vector<CriterionResult> run_acceptance();

// Prints one PASS/FAIL line per criterion; returns true when all passed.
bool print_acceptance(std::ostream& out);

}  // namespace freqbin::acceptance
