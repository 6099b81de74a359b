#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fscpu/dataset.hpp"
#include "fscpu/optimizer.hpp"

namespace fscpu {

// Feature selection recall: |selected ∩ relevant| / |relevant|.
double fsr(std::span<const std::size_t> selected, std::span<const std::uint8_t> relevant_truth);

// One benchmark condition run over several seeds.
struct ExperimentResult {
    SyntheticSpec condition;
    std::vector<std::uint64_t> seeds;
    std::vector<double> fsr_values;   // per seed
    std::vector<double> runtimes;     // per seed, wall seconds
    double mean_fsr = 0.0;
    double std_fsr = 0.0;             // population standard deviation
};

struct ConditionConfig {
    RunConfig run;
    std::vector<double> costs;  // empty = unit costs
    double budget = 25.0;
    std::size_t subsample = 0;  // 0 = use the full generated dataset
    int jobs = 1;               // seeds run in parallel; aggregation stays seed-ordered
};

// For each seed: generate -> (optional subsample) -> min-max normalize ->
// optimize -> score the selection against the ground truth. Seeds default to
// 0..n_seeds-1; generator, subsample and optimizer streams are derived from
// each seed.
ExperimentResult run_condition(const SyntheticSpec& condition, int n_seeds,
                               const ConditionConfig& config);
ExperimentResult run_condition(const SyntheticSpec& condition,
                               std::span<const std::uint64_t> seeds,
                               const ConditionConfig& config);

}  // namespace fscpu
