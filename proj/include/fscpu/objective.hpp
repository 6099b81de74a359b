#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fscpu/clustering.hpp"
#include "fscpu/dataset.hpp"
#include "fscpu/mask.hpp"

namespace fscpu {

// Result of scoring one clustering: the best "declare these clusters
// positive" split and its recall x precision value
//
//     f = hits^2 / (labeled_total * union_size)
//
// where hits = labeled rows inside the chosen clusters, union_size = rows
// inside the chosen clusters. The integer triple is kept so tests can compare
// scores as exact rationals.
struct ObjectiveReport {
    double f_value = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    std::vector<int> chosen_clusters;       // ascending cluster indices
    std::vector<double> per_cluster_ratio;  // labeled_counts[k] / sizes[k]
    std::optional<double> mi_value;
    std::optional<double> combined_value;

    // exact rational: f = hits^2 / (labeled_total * union_size)
    std::uint64_t hits = 0;
    std::uint64_t union_size = 0;
    std::uint64_t labeled_total = 0;
};

// True iff the two reports carry exactly equal scores as rationals.
bool same_f_value(const ObjectiveReport& a, const ObjectiveReport& b);

// Best cluster subset via the sorted-prefix search: sort clusters by
// descending labeled ratio, evaluate every prefix, keep the maximizer
// (ties resolved toward the larger prefix). Runs in O(K log K).
ObjectiveReport objective_value(const Clustering& clustering);

// Exhaustive reference: maximizes over all 2^K - 1 non-empty subsets, ties
// resolved toward the larger subset. Guarded to K <= 20.
ObjectiveReport brute_force_best_subset(const Clustering& clustering);

// Full pipeline for one mask: project columns, cluster, count labels, score.
// Deterministic given the seed.
ObjectiveReport evaluate_mask(const Dataset& data, std::span<const std::uint8_t> mask_bits,
                              const ClusterConfig& config, std::uint64_t seed);

// Plug-in relevance estimate: each selected feature is discretized into 10
// equal-frequency bins (duplicate edges merged) and its empirical mutual
// information with the PU indicator is computed in nats; the mean over
// selected features is returned.
double mi_score(const Dataset& data, std::span<const std::uint8_t> mask_bits);

// Bin index per row for one column; exposed for the estimator's tests.
std::vector<int> equal_frequency_bins(std::span<const double> values, int n_bins);

// Raw scores observed so far in one optimization run. Append-only.
struct ScoreLog {
    std::vector<double> f_scores;
    std::vector<double> mi_scores;

    void append(double f, double mi) {
        f_scores.push_back(f);
        mi_scores.push_back(mi);
    }
};

// Std-normalized sum f/Std[f log] + mi/Std[mi log] over the whole log
// (population standard deviation). A log with fewer than two entries or zero
// spread contributes divisor 1.
double combined_score(double f, double mi, const ScoreLog& log);

}  // namespace fscpu
