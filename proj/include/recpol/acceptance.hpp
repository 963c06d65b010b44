#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace recpol {

/// One verification criterion outcome. Details are deterministic given the
/// seed so that reports can be compared byte for byte.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;   // measured; excluded from serialized reports
  double limit_seconds = 0.0;
};

/// Runs verification criteria 1-9 (replicate-determinism is checked
/// externally by invoking the CLI twice).
std::vector<CriterionResult> run_acceptance_criteria(std::uint64_t seed);

/// JSON report of the results; contains no timing so identical seeds give
/// identical bytes.
std::string acceptance_report_json(std::uint64_t seed,
                                   const std::vector<CriterionResult>& results);

}  // namespace recpol
