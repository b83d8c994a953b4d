#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace poolrisk {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double elapsed_s = 0;
  double budget_s = 0;
  std::string detail;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass() const;
};

// The eight release checks. Each one must both hold numerically and
// finish inside its runtime budget. tol_scale multiplies the
// deterministic tolerances (identities, residuals, solver agreement,
// monotonicity); it exists as a negative control for the harness and is
// 1 in normal use. Statistical confidence bands and the anchored target
// windows are never scaled.
AcceptanceReport run_acceptance(uint64_t seed = 20240901ull,
                                double tol_scale = 1.0);
CriterionResult run_criterion(int id, uint64_t seed, double tol_scale);

std::string format_criterion(const CriterionResult& r);

}  // namespace poolrisk
