#include "fscpu/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "fscpu/errors.hpp"

namespace fscpu {

double fsr(std::span<const std::size_t> selected, std::span<const std::uint8_t> relevant_truth) {
    std::size_t relevant = 0;
    for (auto r : relevant_truth) relevant += r;
    if (relevant == 0)
        throw DataError(DataErrorCode::no_ground_truth, "no ground-truth relevant features");
    std::size_t correct = 0;
    for (std::size_t idx : selected)
        if (idx < relevant_truth.size() && relevant_truth[idx]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(relevant);
}

namespace {

struct SeedOutcome {
    double fsr_value = 0.0;
    double seconds = 0.0;
};

SeedOutcome run_one_seed(const SyntheticSpec& condition, std::uint64_t seed,
                         const ConditionConfig& config) {
    const auto start = std::chrono::steady_clock::now();

    SyntheticSpec spec = condition;
    spec.seed = derive_seed(seed, 0xDA7A, 0);
    Dataset data = spec.cluster_assumption ? generate_clustered(spec)
                                           : generate_outlier(spec.labeled_rate, spec.seed);
    if (config.subsample > 0 && config.subsample < data.n_rows)
        data = subsample_rows(data, config.subsample, derive_seed(seed, 0x5ab5, 0));
    data = apply_minmax(data, fit_minmax(data));

    std::vector<double> costs =
        config.costs.empty() ? unit_costs(data.n_features) : config.costs;
    RunConfig run_config = config.run;
    run_config.seed = derive_seed(seed, 0x0b71, 0);

    const RunResult result = run(data, run_config, costs, config.budget);

    SeedOutcome outcome;
    outcome.fsr_value = fsr(result.selected_features, data.relevant_truth);
    outcome.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

}  // namespace

ExperimentResult run_condition(const SyntheticSpec& condition, int n_seeds,
                               const ConditionConfig& config) {
    if (n_seeds < 1) throw ConfigError("need at least one seed");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_seeds));
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
    return run_condition(condition, seeds, config);
}

ExperimentResult run_condition(const SyntheticSpec& condition,
                               std::span<const std::uint64_t> seeds,
                               const ConditionConfig& config) {
    if (seeds.empty()) throw ConfigError("need at least one seed");

    ExperimentResult result;
    result.condition = condition;
    result.seeds.assign(seeds.begin(), seeds.end());
    result.fsr_values.resize(seeds.size());
    result.runtimes.resize(seeds.size());

    const int jobs = std::max(config.jobs, 1);
    if (jobs == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const SeedOutcome outcome = run_one_seed(condition, seeds[i], config);
            result.fsr_values[i] = outcome.fsr_value;
            result.runtimes[i] = outcome.seconds;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= seeds.size()) return;
                try {
                    const SeedOutcome outcome = run_one_seed(condition, seeds[i], config);
                    result.fsr_values[i] = outcome.fsr_value;
                    result.runtimes[i] = outcome.seconds;
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min<int>(jobs, static_cast<int>(seeds.size()));
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }

    double mean = 0.0;
    for (double v : result.fsr_values) mean += v;
    mean /= static_cast<double>(result.fsr_values.size());
    double var = 0.0;
    for (double v : result.fsr_values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(result.fsr_values.size());
    result.mean_fsr = mean;
    result.std_fsr = std::sqrt(var);
    return result;
}

}  // namespace fscpu
