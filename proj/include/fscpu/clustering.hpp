#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fscpu {

enum class ClusterBackend { gmm, kmeans };

ClusterBackend parse_backend(const std::string& name);  // "gmm" | "kmeans"
std::string backend_name(ClusterBackend backend);

struct ClusterConfig {
    int n_components = 10;
    int max_iter = 100;
    double tol = 1e-4;        // stop when mean log-likelihood improves less
    double var_floor = 1e-6;  // added to every diagonal variance
    ClusterBackend backend = ClusterBackend::gmm;
};

// A hard partition of the rows. Clusters are numbered 0..n_clusters-1 and are
// all non-empty (empty components are dropped and the rest renumbered).
struct Clustering {
    std::vector<int> assignment;             // per-row cluster index
    int n_clusters = 0;
    std::vector<std::size_t> sizes;          // per-cluster row counts
    std::vector<std::size_t> labeled_counts; // per-cluster count of s=1 rows; empty until counted

    static Clustering from_counts(std::vector<std::size_t> sizes, std::vector<std::size_t> labeled_counts);
};

// Diagonal-covariance Gaussian mixture.
struct GmmParams {
    int n_components = 0;
    std::size_t n_features = 0;
    std::vector<double> weights;    // n_components, sums to 1
    std::vector<double> means;      // n_components x n_features, row-major
    std::vector<double> variances;  // n_components x n_features, >= var_floor
};

// Diagnostics captured during fitting, mainly for tests.
struct FitInfo {
    std::vector<double> mean_loglik;   // per EM iteration
    std::vector<int> reseeded_at;      // iterations where a dead component was re-seeded
    GmmParams params;                  // final parameters (gmm backend only)
    bool converged = false;
};

// Cluster the rows of a dense row-major matrix into at most
// config.n_components groups. Deterministic given the seed; K is capped at n.
// GMM backend: EM with a variance floor, initialized from a converged
// k-means partition (k-means++ seeding plus Lloyd iterations); rows are
// assigned to their maximum-responsibility component. k-means backend: the
// same seeding and Lloyd loop, hard assignments.
Clustering fit_predict(std::span<const double> X, std::size_t n_rows, std::size_t n_cols,
                       const ClusterConfig& config, std::uint64_t seed, FitInfo* info = nullptr);

// Recount per-cluster labeled positives from the PU indicator. Pure recount;
// the assignment is untouched.
Clustering count_labeled(Clustering clustering, std::span<const std::uint8_t> s);

}  // namespace fscpu
