#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fscpu::check {

struct CheckOptions {
    std::uint64_t seed = 0;
    int oracle_trials = 1000;   // prefix-search vs exhaustive sweep size
    int mcar_trials = 200;
    int beta_trials = 200;
    int repair_trials = 10000;
    int mi_trials = 100;
    // Negative control: swap in a deliberately broken subset search (the
    // first-decrease early stop) to prove the oracle sweep catches it.
    bool faulty_objective = false;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// The property suite behind `fscpu check`:
//   oracle_equivalence   prefix search == exhaustive search on random and
//                        crafted clusterings (exact rational f, same subset)
//   ratio_separation     every inside ratio strictly beats every outside one
//   mcar_selection       constant-ratio instances select exactly the leading
//                        block of clusters
//   beta_invariance      scaling all labeled counts by an integer scales f by
//                        the same factor and keeps the chosen subset
//   repair_contract      repaired masks are always feasible and maximal;
//                        unit costs pin the popcount to the budget
//   mi_oracle            the binned MI estimate matches a direct
//                        contingency-table computation
//   combined_score_cases the std-normalized combination on worked examples
std::vector<CheckResult> run_checks(const CheckOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace fscpu::check
