#include "fscpu/objective.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "fscpu/errors.hpp"

namespace fscpu {

namespace {

using u128 = unsigned __int128;

// Exact comparison of hits_a^2 / union_a vs hits_b^2 / union_b.
int compare_subset_value(std::uint64_t hits_a, std::uint64_t union_a, std::uint64_t hits_b,
                         std::uint64_t union_b) {
    const u128 lhs = u128(hits_a) * hits_a * union_b;
    const u128 rhs = u128(hits_b) * hits_b * union_a;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

std::uint64_t total_labeled(const Clustering& c) {
    std::uint64_t total = 0;
    for (std::size_t v : c.labeled_counts) total += v;
    return total;
}

ObjectiveReport make_report(const Clustering& c, std::uint64_t hits, std::uint64_t union_size,
                            std::uint64_t labeled, std::vector<int> chosen) {
    std::sort(chosen.begin(), chosen.end());
    ObjectiveReport report;
    report.hits = hits;
    report.union_size = union_size;
    report.labeled_total = labeled;
    report.recall = static_cast<double>(hits) / static_cast<double>(labeled);
    report.precision = static_cast<double>(hits) / static_cast<double>(union_size);
    report.f_value = report.recall * report.precision;
    report.chosen_clusters = std::move(chosen);
    report.per_cluster_ratio.resize(c.sizes.size());
    for (std::size_t k = 0; k < c.sizes.size(); ++k)
        report.per_cluster_ratio[k] =
            static_cast<double>(c.labeled_counts[k]) / static_cast<double>(c.sizes[k]);
    return report;
}

void require_counts(const Clustering& c) {
    if (c.labeled_counts.size() != c.sizes.size() ||
        c.sizes.size() != static_cast<std::size_t>(c.n_clusters))
        throw DataError(DataErrorCode::length_mismatch,
                        "clustering is missing labeled counts (run count_labeled first)");
}

}  // namespace

bool same_f_value(const ObjectiveReport& a, const ObjectiveReport& b) {
    // hits_a^2 / (L_a C_a) == hits_b^2 / (L_b C_b), cross-multiplied exactly.
    const u128 lhs = u128(a.hits) * a.hits * b.labeled_total * b.union_size;
    const u128 rhs = u128(b.hits) * b.hits * a.labeled_total * a.union_size;
    return lhs == rhs;
}

ObjectiveReport objective_value(const Clustering& clustering) {
    require_counts(clustering);
    const std::uint64_t labeled = total_labeled(clustering);
    if (labeled == 0) throw DataError(DataErrorCode::no_labeled_data, "no labeled data");

    const std::size_t k = clustering.sizes.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& a = clustering.labeled_counts;
    const auto& c = clustering.sizes;
    // Descending labeled ratio, exactly; ties by larger cluster, then index.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const u128 lhs = u128(a[x]) * c[y];
        const u128 rhs = u128(a[y]) * c[x];
        if (lhs != rhs) return lhs > rhs;
        if (c[x] != c[y]) return c[x] > c[y];
        return x < y;
    });

    // Scan every prefix; >= keeps the longer prefix on exact ties.
    std::uint64_t hits = 0, union_size = 0;
    std::uint64_t best_hits = 0, best_union = 1;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < k; ++i) {
        hits += a[order[i]];
        union_size += c[order[i]];
        if (compare_subset_value(hits, union_size, best_hits, best_union) >= 0) {
            best_hits = hits;
            best_union = union_size;
            best_len = i + 1;
        }
    }

    std::vector<int> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_len));
    return make_report(clustering, best_hits, best_union, labeled, std::move(chosen));
}

ObjectiveReport brute_force_best_subset(const Clustering& clustering) {
    require_counts(clustering);
    const std::size_t k = clustering.sizes.size();
    if (k > 20)
        throw DataError(DataErrorCode::too_many_clusters,
                        "exhaustive search is limited to 20 clusters");
    const std::uint64_t labeled = total_labeled(clustering);
    if (labeled == 0) throw DataError(DataErrorCode::no_labeled_data, "no labeled data");

    std::uint64_t best_hits = 0, best_union = 1, best_mask = 0;
    int best_bits = -1;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        std::uint64_t hits = 0, union_size = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::uint64_t{1} << i)) {
                hits += clustering.labeled_counts[i];
                union_size += clustering.sizes[i];
            }
        const int bits = std::popcount(mask);
        const int cmp = compare_subset_value(hits, union_size, best_hits, best_union);
        if (cmp > 0 || (cmp == 0 && (bits > best_bits || (bits == best_bits && mask > best_mask)))) {
            best_hits = hits;
            best_union = union_size;
            best_mask = mask;
            best_bits = bits;
        }
    }

    std::vector<int> chosen;
    for (std::size_t i = 0; i < k; ++i)
        if (best_mask & (std::uint64_t{1} << i)) chosen.push_back(static_cast<int>(i));
    return make_report(clustering, best_hits, best_union, labeled, std::move(chosen));
}

ObjectiveReport evaluate_mask(const Dataset& data, std::span<const std::uint8_t> mask_bits,
                              const ClusterConfig& config, std::uint64_t seed) {
    if (mask_bits.size() != data.n_features)
        throw DataError(DataErrorCode::length_mismatch, "mask length does not match feature count");
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < mask_bits.size(); ++j)
        if (mask_bits[j]) cols.push_back(j);
    if (cols.empty()) throw DataError(DataErrorCode::empty_mask, "mask selects no feature");

    std::vector<double> masked(data.n_rows * cols.size());
    for (std::size_t i = 0; i < data.n_rows; ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            masked[i * cols.size() + j] = data.at(i, cols[j]);

    Clustering clustering = fit_predict(masked, data.n_rows, cols.size(), config, seed);
    clustering = count_labeled(std::move(clustering), data.s);
    return objective_value(clustering);
}

std::vector<int> equal_frequency_bins(std::span<const double> values, int n_bins) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    // Quantile cut points; duplicates collapse, so constant data yields one bin.
    std::vector<double> edges;
    for (int b = 1; b < n_bins; ++b) {
        const double edge = sorted[n * static_cast<std::size_t>(b) / static_cast<std::size_t>(n_bins)];
        if (edges.empty() || edge > edges.back()) edges.push_back(edge);
    }

    std::vector<int> bins(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Intervals (-inf, e0], (e0, e1], ..., (e_last, inf).
        const auto it = std::lower_bound(edges.begin(), edges.end(), values[i]);
        bins[i] = static_cast<int>(it - edges.begin());
    }
    return bins;
}

double mi_score(const Dataset& data, std::span<const std::uint8_t> mask_bits) {
    if (mask_bits.size() != data.n_features)
        throw DataError(DataErrorCode::length_mismatch, "mask length does not match feature count");
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < mask_bits.size(); ++j)
        if (mask_bits[j]) cols.push_back(j);
    if (cols.empty()) throw DataError(DataErrorCode::empty_mask, "mask selects no feature");

    const double n = static_cast<double>(data.n_rows);
    const std::size_t n_pos = data.labeled_count();
    const double p_label[2] = {(n - static_cast<double>(n_pos)) / n, static_cast<double>(n_pos) / n};

    std::vector<double> column(data.n_rows);
    double total = 0.0;
    for (std::size_t col : cols) {
        for (std::size_t i = 0; i < data.n_rows; ++i) column[i] = data.at(i, col);
        const std::vector<int> bins = equal_frequency_bins(column, 10);
        const int n_bins = *std::max_element(bins.begin(), bins.end()) + 1;

        std::vector<double> joint(static_cast<std::size_t>(n_bins) * 2, 0.0);
        std::vector<double> marginal(static_cast<std::size_t>(n_bins), 0.0);
        for (std::size_t i = 0; i < data.n_rows; ++i) {
            joint[static_cast<std::size_t>(bins[i]) * 2 + data.s[i]] += 1.0;
            marginal[static_cast<std::size_t>(bins[i])] += 1.0;
        }

        double mi = 0.0;
        for (int b = 0; b < n_bins; ++b)
            for (int lab = 0; lab < 2; ++lab) {
                const double nxy = joint[static_cast<std::size_t>(b) * 2 + static_cast<std::size_t>(lab)];
                if (nxy == 0.0 || p_label[lab] == 0.0) continue;
                const double pxy = nxy / n;
                mi += pxy * std::log(pxy / (marginal[static_cast<std::size_t>(b)] / n * p_label[lab]));
            }
        total += std::max(mi, 0.0);  // clamp tiny negative rounding
    }
    return total / static_cast<double>(cols.size());
}

namespace {

double population_std(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return std::sqrt(var / n);
}

}  // namespace

double combined_score(double f, double mi, const ScoreLog& log) {
    double f_div = 1.0, mi_div = 1.0;
    if (log.f_scores.size() >= 2) {
        const double s = population_std(log.f_scores);
        if (s > 0.0) f_div = s;
    }
    if (log.mi_scores.size() >= 2) {
        const double s = population_std(log.mi_scores);
        if (s > 0.0) mi_div = s;
    }
    return f / f_div + mi / mi_div;
}

}  // namespace fscpu
