#include "fscpu/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fscpu/errors.hpp"
#include "fscpu/rng.hpp"

namespace fscpu {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// k-means++ seeding: first center uniform, then D^2 sampling against the
// nearest chosen center. Returns row indices.
std::vector<std::size_t> kmeanspp_seed(std::span<const double> X, std::size_t n, std::size_t d,
                                       int k, Rng& rng) {
    std::vector<std::size_t> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(static_cast<std::size_t>(rng.uniform_int(n)));

    std::vector<double> dist2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = X[i * d + j] - X[centers[0] * d + j];
            acc += diff * diff;
        }
        dist2[i] = acc;
    }

    while (centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (double v : dist2) total += v;
        std::size_t next;
        if (total > 0.0) {
            next = rng.categorical(dist2);
        } else {
            next = static_cast<std::size_t>(rng.uniform_int(n));  // all rows coincide with a center
        }
        centers.push_back(next);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = X[i * d + j] - X[next * d + j];
                acc += diff * diff;
            }
            dist2[i] = std::min(dist2[i], acc);
        }
    }
    return centers;
}

// Lloyd iterations from the given centers until the assignment stabilizes.
// Emptied clusters are re-seeded at the row farthest from its own center.
std::vector<int> lloyd_refine(std::span<const double> X, std::size_t n, std::size_t d,
                              std::vector<double>& centers, int k, int max_iter) {
    std::vector<int> assign(n, -1);
    std::vector<double> row_dist(n, 0.0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = X[i * d + j] - centers[static_cast<std::size_t>(c) * d + j];
                    acc += diff * diff;
                }
                if (acc < best) {
                    best = acc;
                    best_c = c;
                }
            }
            row_dist[i] = best;
            if (assign[i] != best_c) {
                assign[i] = best_c;
                changed = true;
            }
        }
        if (!changed) break;

        std::vector<double> sums(static_cast<std::size_t>(k) * d, 0.0);
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[static_cast<std::size_t>(assign[i])];
            for (std::size_t j = 0; j < d; ++j)
                sums[static_cast<std::size_t>(assign[i]) * d + j] += X[i * d + j];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) {
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (row_dist[i] > row_dist[far]) far = i;
                for (std::size_t j = 0; j < d; ++j)
                    centers[static_cast<std::size_t>(c) * d + j] = X[far * d + j];
                continue;
            }
            for (std::size_t j = 0; j < d; ++j)
                centers[static_cast<std::size_t>(c) * d + j] =
                    sums[static_cast<std::size_t>(c) * d + j] /
                    static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
    }
    return assign;
}

std::vector<double> per_dim_variance(std::span<const double> X, std::size_t n, std::size_t d) {
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += X[i * d + j];
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = X[i * d + j] - mean[j];
            var[j] += diff * diff;
        }
    for (double& v : var) v /= static_cast<double>(n);
    return var;
}

// Compress the raw per-row component labels into a Clustering with non-empty
// clusters 0..K'-1, in first-appearance-of-original-index order.
Clustering compress_assignment(const std::vector<int>& raw, int k) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int a : raw) ++counts[static_cast<std::size_t>(a)];

    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (int c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0) remap[static_cast<std::size_t>(c)] = next++;

    Clustering result;
    result.n_clusters = next;
    result.assignment.resize(raw.size());
    result.sizes.assign(static_cast<std::size_t>(next), 0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const int c = remap[static_cast<std::size_t>(raw[i])];
        result.assignment[i] = c;
        ++result.sizes[static_cast<std::size_t>(c)];
    }
    return result;
}

struct GmmState {
    int k = 0;
    std::size_t d = 0;
    std::vector<double> weights;
    std::vector<double> means;  // k x d
    std::vector<double> vars;   // k x d
};

// Coefficients for the expanded diagonal-Gaussian log density
//   log N(x) = -0.5 * (sum_j x_j^2 / v_j - 2 sum_j x_j mu_j / v_j + cst)
struct LogDensityCoeffs {
    std::vector<double> inv_var;   // k x d
    std::vector<double> mu_over_var;  // k x d
    std::vector<double> cst;       // k, includes log weight
};

LogDensityCoeffs make_coeffs(const GmmState& g) {
    LogDensityCoeffs c;
    c.inv_var.resize(g.vars.size());
    c.mu_over_var.resize(g.vars.size());
    c.cst.assign(static_cast<std::size_t>(g.k), 0.0);
    for (int comp = 0; comp < g.k; ++comp) {
        double cst = static_cast<double>(g.d) * kLog2Pi;
        for (std::size_t j = 0; j < g.d; ++j) {
            const std::size_t idx = static_cast<std::size_t>(comp) * g.d + j;
            const double v = g.vars[idx];
            c.inv_var[idx] = 1.0 / v;
            c.mu_over_var[idx] = g.means[idx] / v;
            cst += g.means[idx] * g.means[idx] / v + std::log(v);
        }
        const double w = std::max(g.weights[static_cast<std::size_t>(comp)], 1e-300);
        c.cst[static_cast<std::size_t>(comp)] = -0.5 * cst + std::log(w);
    }
    return c;
}

Clustering fit_gmm(std::span<const double> X, std::size_t n, std::size_t d,
                   const ClusterConfig& config, std::uint64_t seed, FitInfo* info) {
    const int k = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(std::max(config.n_components, 1)), n));
    Rng rng(seed);

    std::vector<double> xsq(n * d);
    for (std::size_t i = 0; i < n * d; ++i) xsq[i] = X[i] * X[i];

    // Init from a converged k-means partition (k-means++ seeding, then Lloyd):
    // one-hot responsibilities give the starting weights, means and
    // within-cluster variances.
    GmmState g;
    g.k = k;
    g.d = d;
    g.means.resize(static_cast<std::size_t>(k) * d);
    const std::vector<std::size_t> seeds = kmeanspp_seed(X, n, d, k, rng);
    for (int c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j)
            g.means[static_cast<std::size_t>(c) * d + j] = X[seeds[static_cast<std::size_t>(c)] * d + j];
    const std::vector<int> hard = lloyd_refine(X, n, d, g.means, k, config.max_iter);

    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    g.vars.assign(static_cast<std::size_t>(k) * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(hard[i]);
        ++counts[c];
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = X[i * d + j] - g.means[c * d + j];
            g.vars[c * d + j] += diff * diff;
        }
    }
    std::vector<double> global_var = per_dim_variance(X, n, d);
    for (double& v : global_var) v += config.var_floor;
    g.weights.assign(static_cast<std::size_t>(k), 0.0);
    for (int c = 0; c < k; ++c) {
        const std::size_t count = counts[static_cast<std::size_t>(c)];
        if (count == 0) {
            // Lloyd cannot leave a cluster empty unless rows coincide; fall
            // back to the global spread.
            g.weights[static_cast<std::size_t>(c)] = 1.0 / static_cast<double>(n);
            std::copy(global_var.begin(), global_var.end(),
                      g.vars.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c) * d));
            continue;
        }
        g.weights[static_cast<std::size_t>(c)] = static_cast<double>(count) / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) {
            auto& v = g.vars[static_cast<std::size_t>(c) * d + j];
            v = v / static_cast<double>(count) + config.var_floor;
        }
    }
    double w0 = 0.0;
    for (double w : g.weights) w0 += w;
    for (double& w : g.weights) w /= w0;

    std::vector<double> logp(static_cast<std::size_t>(k));
    std::vector<double> gamma(static_cast<std::size_t>(k));
    std::vector<double> resp_sum(static_cast<std::size_t>(k));
    std::vector<double> sum_x(static_cast<std::size_t>(k) * d);
    std::vector<double> sum_xsq(static_cast<std::size_t>(k) * d);
    std::vector<double> row_loglik(n);

    double prev_mean_ll = -std::numeric_limits<double>::infinity();
    bool converged = false;

    for (int iter = 0; iter < config.max_iter; ++iter) {
        LogDensityCoeffs coeffs = make_coeffs(g);

        std::fill(resp_sum.begin(), resp_sum.end(), 0.0);
        std::fill(sum_x.begin(), sum_x.end(), 0.0);
        std::fill(sum_xsq.begin(), sum_xsq.end(), 0.0);
        double loglik = 0.0;

        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = X.data() + i * d;
            const double* xi_sq = xsq.data() + i * d;
            double max_lp = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double* a = coeffs.inv_var.data() + static_cast<std::size_t>(c) * d;
                const double* b = coeffs.mu_over_var.data() + static_cast<std::size_t>(c) * d;
                double quad = 0.0, lin = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    quad += xi_sq[j] * a[j];
                    lin += xi[j] * b[j];
                }
                const double lp = coeffs.cst[static_cast<std::size_t>(c)] - 0.5 * quad + lin;
                logp[static_cast<std::size_t>(c)] = lp;
                max_lp = std::max(max_lp, lp);
            }
            double z = 0.0;
            for (int c = 0; c < k; ++c) {
                gamma[static_cast<std::size_t>(c)] = std::exp(logp[static_cast<std::size_t>(c)] - max_lp);
                z += gamma[static_cast<std::size_t>(c)];
            }
            row_loglik[i] = max_lp + std::log(z);
            loglik += row_loglik[i];
            const double inv_z = 1.0 / z;
            for (int c = 0; c < k; ++c) {
                const double r = gamma[static_cast<std::size_t>(c)] * inv_z;
                resp_sum[static_cast<std::size_t>(c)] += r;
                double* sx = sum_x.data() + static_cast<std::size_t>(c) * d;
                double* sq = sum_xsq.data() + static_cast<std::size_t>(c) * d;
                for (std::size_t j = 0; j < d; ++j) {
                    sx[j] += r * xi[j];
                    sq[j] += r * xi_sq[j];
                }
            }
        }

        const double mean_ll = loglik / static_cast<double>(n);
        if (info) info->mean_loglik.push_back(mean_ll);

        // M-step
        bool reseeded = false;
        for (int c = 0; c < k; ++c) {
            const double nk = resp_sum[static_cast<std::size_t>(c)];
            if (nk < 1e-6) {
                // Dead component: restart it at the row the current mixture
                // explains worst.
                std::size_t worst = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (row_loglik[i] < row_loglik[worst]) worst = i;
                for (std::size_t j = 0; j < d; ++j) {
                    g.means[static_cast<std::size_t>(c) * d + j] = X[worst * d + j];
                    g.vars[static_cast<std::size_t>(c) * d + j] = global_var[j];
                }
                g.weights[static_cast<std::size_t>(c)] = 1.0 / static_cast<double>(n);
                reseeded = true;
                if (info) info->reseeded_at.push_back(iter);
                continue;
            }
            g.weights[static_cast<std::size_t>(c)] = nk / static_cast<double>(n);
            const double inv_nk = 1.0 / nk;
            for (std::size_t j = 0; j < d; ++j) {
                const std::size_t idx = static_cast<std::size_t>(c) * d + j;
                const double mu = sum_x[idx] * inv_nk;
                g.means[idx] = mu;
                const double var = sum_xsq[idx] * inv_nk - mu * mu;
                g.vars[idx] = std::max(var, 0.0) + config.var_floor;
            }
        }
        double wsum = 0.0;
        for (double w : g.weights) wsum += w;
        for (double& w : g.weights) w /= wsum;

        if (reseeded) {
            prev_mean_ll = -std::numeric_limits<double>::infinity();
            continue;
        }
        if (mean_ll - prev_mean_ll < config.tol) {
            converged = true;
            break;
        }
        prev_mean_ll = mean_ll;
    }

    // Final hard assignment under the fitted parameters.
    LogDensityCoeffs coeffs = make_coeffs(g);
    std::vector<int> raw(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = X.data() + i * d;
        const double* xi_sq = xsq.data() + i * d;
        double best_lp = -std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (int c = 0; c < k; ++c) {
            const double* a = coeffs.inv_var.data() + static_cast<std::size_t>(c) * d;
            const double* b = coeffs.mu_over_var.data() + static_cast<std::size_t>(c) * d;
            double quad = 0.0, lin = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                quad += xi_sq[j] * a[j];
                lin += xi[j] * b[j];
            }
            const double lp = coeffs.cst[static_cast<std::size_t>(c)] - 0.5 * quad + lin;
            if (lp > best_lp) {
                best_lp = lp;
                best_c = c;
            }
        }
        raw[i] = best_c;
    }

    if (info) {
        info->converged = converged;
        info->params.n_components = k;
        info->params.n_features = d;
        info->params.weights = g.weights;
        info->params.means = g.means;
        info->params.variances = g.vars;
    }
    return compress_assignment(raw, k);
}

Clustering fit_kmeans(std::span<const double> X, std::size_t n, std::size_t d,
                      const ClusterConfig& config, std::uint64_t seed, FitInfo* info) {
    const int k = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(std::max(config.n_components, 1)), n));
    Rng rng(seed);

    const std::vector<std::size_t> seeds = kmeanspp_seed(X, n, d, k, rng);
    std::vector<double> centers(static_cast<std::size_t>(k) * d);
    for (int c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j)
            centers[static_cast<std::size_t>(c) * d + j] = X[seeds[static_cast<std::size_t>(c)] * d + j];
    const std::vector<int> assign = lloyd_refine(X, n, d, centers, k, config.max_iter);

    if (info) info->converged = true;
    return compress_assignment(assign, k);
}

}  // namespace

ClusterBackend parse_backend(const std::string& name) {
    if (name == "gmm") return ClusterBackend::gmm;
    if (name == "kmeans") return ClusterBackend::kmeans;
    throw ConfigError("unknown clustering backend '" + name + "' (expected gmm or kmeans)");
}

std::string backend_name(ClusterBackend backend) {
    return backend == ClusterBackend::gmm ? "gmm" : "kmeans";
}

Clustering Clustering::from_counts(std::vector<std::size_t> sizes,
                                   std::vector<std::size_t> labeled_counts) {
    if (sizes.size() != labeled_counts.size())
        throw DataError(DataErrorCode::length_mismatch, "sizes and labeled_counts length mismatch");
    Clustering c;
    c.n_clusters = static_cast<int>(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) throw DataError(DataErrorCode::length_mismatch, "empty cluster in sizes");
        if (labeled_counts[k] > sizes[k])
            throw DataError(DataErrorCode::length_mismatch, "labeled count exceeds cluster size");
        for (std::size_t r = 0; r < sizes[k]; ++r) c.assignment.push_back(static_cast<int>(k));
    }
    c.sizes = std::move(sizes);
    c.labeled_counts = std::move(labeled_counts);
    return c;
}

Clustering fit_predict(std::span<const double> X, std::size_t n_rows, std::size_t n_cols,
                       const ClusterConfig& config, std::uint64_t seed, FitInfo* info) {
    if (n_rows == 0 || n_cols == 0)
        throw DataError(DataErrorCode::zero_rows, "fit_predict needs at least one row and column");
    if (X.size() != n_rows * n_cols)
        throw DataError(DataErrorCode::length_mismatch, "matrix buffer size mismatch");
    if (config.backend == ClusterBackend::kmeans)
        return fit_kmeans(X, n_rows, n_cols, config, seed, info);
    return fit_gmm(X, n_rows, n_cols, config, seed, info);
}

Clustering count_labeled(Clustering clustering, std::span<const std::uint8_t> s) {
    if (s.size() != clustering.assignment.size())
        throw DataError(DataErrorCode::length_mismatch,
                        "PU indicator length does not match the assignment");
    clustering.labeled_counts.assign(static_cast<std::size_t>(clustering.n_clusters), 0);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) ++clustering.labeled_counts[static_cast<std::size_t>(clustering.assignment[i])];
    return clustering;
}

}  // namespace fscpu
