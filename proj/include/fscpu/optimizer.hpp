#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fscpu/clustering.hpp"
#include "fscpu/dataset.hpp"
#include "fscpu/mask.hpp"
#include "fscpu/rng.hpp"

namespace fscpu {

// Bernoulli sampling parameters of the mask distribution, kept inside
// [epsilon, 1 - epsilon] at all times.
struct ThetaVector {
    std::vector<double> theta;
    double epsilon = 0.0;
    double eta = 0.0;

    std::size_t size() const { return theta.size(); }
    void clip();
};

enum class ObjectiveMode { fscpu, fscpu_mi };

ObjectiveMode parse_objective_mode(const std::string& name);  // "fscpu" | "fscpu-mi"
std::string objective_mode_name(ObjectiveMode mode);

struct RunConfig {
    int iterations = 3000;
    std::uint64_t seed = 0;
    ObjectiveMode objective_mode = ObjectiveMode::fscpu;
    int trace_every = 10;
    ClusterConfig clustering;          // K and EM settings for the FSCPU objective
    bool parallel_candidates = true;   // evaluate the two candidates concurrently
};

struct ThetaTraceRow {
    int iteration = 0;
    std::vector<double> theta;
};

struct RunResult {
    ThetaVector final_theta;
    std::vector<std::size_t> selected_features;  // ascending indices
    std::vector<ThetaTraceRow> theta_trace;
    std::vector<std::uint8_t> best_mask;
    double best_score = 0.0;       // score in the run's objective mode
    double best_f = 0.0;           // raw f of the best-seen mask
    std::optional<double> best_mi; // raw mi of the best-seen mask (fscpu_mi mode)
    int best_iteration = 0;
    double convergence_fraction = 0.0;  // share of theta in [0, 0.1] or [0.9, 1]
    std::size_t evaluations = 0;
    double wall_seconds = 0.0;
    RunConfig config;
    std::vector<double> costs;
    double budget = 0.0;
};

// theta_l = budget / sum(costs) for every l, clipped to [eps, 1-eps] with the
// defaults eps = 1/d and eta = 1/(2d).
ThetaVector init_theta(std::span<const double> costs, double budget);

// Independent Bernoulli(theta_l) bits, carrying the cost context.
FeatureMask sample_mask(const ThetaVector& theta, std::span<const double> costs, double budget,
                        Rng& rng);

// Two-phase projection onto the feasible-and-maximal set: while over budget,
// drop a selected bit with probability proportional to 1 - theta_l; then,
// while some unselected bit still fits, add one with probability proportional
// to theta_l among the affordable ones.
FeatureMask repair(FeatureMask mask, const ThetaVector& theta, Rng& rng);

// theta += eta * sign(score_a - score_b) * (mask_a - mask_b), then clip.
// sign(0) = 0, so ties leave theta untouched.
void update_theta(ThetaVector& theta, const FeatureMask& mask_a, const FeatureMask& mask_b,
                  double score_a, double score_b);

// Greedy extraction: features sorted by descending theta (ties by index),
// taken while they fit the remaining budget.
std::vector<std::size_t> select_top_theta(const ThetaVector& theta, std::span<const double> costs,
                                          double budget);

// Raw scores of one candidate mask. mi is only consulted in fscpu_mi mode.
struct CandidateScores {
    double f = 0.0;
    std::optional<double> mi;
};

using ScoreFn = std::function<CandidateScores(const FeatureMask&, std::uint64_t eval_seed)>;

// The generic two-candidate loop: sample, repair, evaluate, update, T times.
// Candidate evaluations receive seeds derived from (seed, iteration,
// candidate), so the result is identical whether or not they run in parallel.
RunResult optimize(std::size_t d, std::span<const double> costs, double budget,
                   const RunConfig& config, const ScoreFn& score_fn);

// Feature selection on a dataset: optimize() wired to the clustering
// objective (plus the mutual-information term in fscpu_mi mode).
RunResult run(const Dataset& data, const RunConfig& config, std::span<const double> costs,
              double budget);

}  // namespace fscpu
