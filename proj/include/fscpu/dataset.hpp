#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fscpu {

// Recipe for the synthetic PU benchmark generators.
//
// cluster_assumption=true  -> positives drawn from their own Gaussian clusters
// cluster_assumption=false -> positives are the high-norm tail of one Gaussian
struct SyntheticSpec {
    bool cluster_assumption = true;
    double labeled_rate = 0.4;    // fraction of true positives that receive s=1
    int n_negative_clusters = 8;  // ignored when cluster_assumption=false
    int n_positive_clusters = 1;  // ignored when cluster_assumption=false
    std::uint64_t seed = 0;
};

// A positive-unlabeled dataset: a dense row-major feature matrix plus the
// per-row PU indicator s (1 = labeled positive, 0 = unlabeled). Synthetic
// datasets additionally carry ground truth that selection must never see:
// the relevant-column mask and the true per-row class.
struct Dataset {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::vector<double> X;  // row-major, n_rows x n_features
    std::vector<std::uint8_t> s;
    std::vector<std::string> feature_names;       // empty = unnamed
    std::vector<std::uint8_t> relevant_truth;     // empty = unknown, else n_features
    std::vector<std::uint8_t> y_truth;            // empty = unknown, else n_rows
    std::optional<SyntheticSpec> generator;       // echo of the generating spec

    double at(std::size_t row, std::size_t col) const { return X[row * n_features + col]; }
    double& at(std::size_t row, std::size_t col) { return X[row * n_features + col]; }

    std::size_t labeled_count() const;
    std::size_t unlabeled_count() const { return n_rows - labeled_count(); }
    bool has_relevant_truth() const { return !relevant_truth.empty(); }

    // Enforces the structural invariants (finite values, both label kinds
    // present, consistent lengths). Throws DataError on violation.
    void validate() const;
};

struct NormalizationParams {
    std::vector<double> mins;
    std::vector<double> maxs;
};

// ---- CSV I/O ---------------------------------------------------------------
// Feature CSV: one header row, one user-named 0/1 label column, all other
// columns numeric. Ground truth travels in a JSON sidecar at
// "<csv path>.truth.json", never inside the feature CSV.

Dataset load_csv(const std::string& path, const std::string& label_column);
void write_csv(const Dataset& data, const std::string& path);
std::string sidecar_path(const std::string& csv_path);

// ---- Normalization ---------------------------------------------------------

NormalizationParams fit_minmax(const Dataset& data);
// Maps each feature through (x - min) / (max - min); a constant feature maps
// to 0 everywhere. No clipping: unseen data may land outside [0, 1].
Dataset apply_minmax(const Dataset& data, const NormalizationParams& params);

// ---- Synthetic benchmark generators ----------------------------------------
// Both produce 4500 rows x 50 features: 25 relevant columns, 20 irrelevant
// columns uniform on [-10, 10], and 5 irrelevant columns that copy a random
// uniform column and add N(0, 1) noise per row. 500 rows are true positives;
// floor(labeled_rate * 500) of them, chosen uniformly, get s=1.

// Relevant block: 4000 negative rows from n_negative_clusters isotropic
// Gaussians (variance 10, per-dimension means uniform on [-5, 5]) and 500
// positive rows from n_positive_clusters such Gaussians, split equally.
Dataset generate_clustered(const SyntheticSpec& spec);

// Relevant block: 4500 rows from a single Gaussian with variance 25; the 500
// rows of largest Euclidean norm over the relevant columns are the positives.
Dataset generate_outlier(double labeled_rate, std::uint64_t seed);

// Uniform row subsample without replacement, keeping row order and ground
// truth. Used by the experiment harness's fast variants.
Dataset subsample_rows(const Dataset& data, std::size_t n_keep, std::uint64_t seed);

}  // namespace fscpu
