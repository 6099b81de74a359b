#include "fscpu/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "fscpu/clustering.hpp"
#include "fscpu/dataset.hpp"
#include "fscpu/mask.hpp"
#include "fscpu/objective.hpp"
#include "fscpu/optimizer.hpp"
#include "fscpu/rng.hpp"

namespace fscpu::check {

namespace {

using u128 = unsigned __int128;

Clustering random_clustering(Rng& rng, int max_k) {
    for (;;) {
        const int k = 2 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_k - 1)));
        std::vector<std::size_t> sizes(static_cast<std::size_t>(k));
        std::vector<std::size_t> labeled(static_cast<std::size_t>(k));
        std::size_t total_labeled = 0;
        for (int i = 0; i < k; ++i) {
            sizes[static_cast<std::size_t>(i)] = 1 + rng.uniform_int(50);
            labeled[static_cast<std::size_t>(i)] =
                rng.uniform_int(sizes[static_cast<std::size_t>(i)] + 1);
            total_labeled += labeled[static_cast<std::size_t>(i)];
        }
        if (total_labeled >= 1) return Clustering::from_counts(std::move(sizes), std::move(labeled));
    }
}

// Hand-picked regressions for the subset search. The first one has a prefix
// value sequence that dips and then rises above its first peak, so a scan
// that stops at the first decrease returns the wrong subset. The second one
// exercises the exact-tie rule (both prefixes score 1, the larger wins).
std::vector<Clustering> crafted_instances() {
    std::vector<Clustering> out;
    out.push_back(Clustering::from_counts({1, 10, 10}, {1, 2, 2}));
    out.push_back(Clustering::from_counts({1, 3}, {1, 1}));
    out.push_back(Clustering::from_counts({10, 10, 10}, {8, 4, 0}));
    out.push_back(Clustering::from_counts({7}, {3}));
    return out;
}

// The first-decrease early stop over the sorted prefixes. Kept here purely as
// the negative control for the oracle sweep.
ObjectiveReport early_stop_variant(const Clustering& clustering) {
    const std::size_t k = clustering.sizes.size();
    const auto& a = clustering.labeled_counts;
    const auto& c = clustering.sizes;
    std::uint64_t labeled = 0;
    for (std::size_t v : a) labeled += v;

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const u128 lhs = u128(a[x]) * c[y];
        const u128 rhs = u128(a[y]) * c[x];
        if (lhs != rhs) return lhs > rhs;
        if (c[x] != c[y]) return c[x] > c[y];
        return x < y;
    });

    std::uint64_t hits = a[order[0]], union_size = c[order[0]];
    std::size_t len = 1;
    for (std::size_t i = 1; i < k; ++i) {
        const std::uint64_t next_hits = hits + a[order[i]];
        const std::uint64_t next_union = union_size + c[order[i]];
        const u128 lhs = u128(next_hits) * next_hits * union_size;
        const u128 rhs = u128(hits) * hits * next_union;
        if (lhs < rhs) break;
        hits = next_hits;
        union_size = next_union;
        len = i + 1;
    }

    ObjectiveReport report;
    report.hits = hits;
    report.union_size = union_size;
    report.labeled_total = labeled;
    report.recall = static_cast<double>(hits) / static_cast<double>(labeled);
    report.precision = static_cast<double>(hits) / static_cast<double>(union_size);
    report.f_value = report.recall * report.precision;
    report.chosen_clusters.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
    std::sort(report.chosen_clusters.begin(), report.chosen_clusters.end());
    return report;
}

CheckResult timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult result;
    result.name = name;
    auto [passed, detail] = body();
    result.passed = passed;
    result.detail = std::move(detail);
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string describe_subset(const std::vector<int>& subset) {
    std::ostringstream ss;
    ss << '{';
    for (std::size_t i = 0; i < subset.size(); ++i) ss << (i ? "," : "") << subset[i];
    ss << '}';
    return ss.str();
}

CheckResult check_oracle_equivalence(const CheckOptions& options) {
    return timed("oracle_equivalence", [&]() -> std::pair<bool, std::string> {
        Rng rng(derive_seed(options.seed, 0x01, 0));
        std::vector<Clustering> instances = crafted_instances();
        instances.reserve(instances.size() + static_cast<std::size_t>(options.oracle_trials));
        for (int t = 0; t < options.oracle_trials; ++t) instances.push_back(random_clustering(rng, 12));

        for (std::size_t i = 0; i < instances.size(); ++i) {
            const ObjectiveReport fast = options.faulty_objective
                                             ? early_stop_variant(instances[i])
                                             : objective_value(instances[i]);
            const ObjectiveReport exact = brute_force_best_subset(instances[i]);
            if (!same_f_value(fast, exact) || fast.chosen_clusters != exact.chosen_clusters) {
                std::ostringstream ss;
                ss << "instance " << i << ": prefix search f=" << fast.f_value << " K="
                   << describe_subset(fast.chosen_clusters) << " vs exhaustive f=" << exact.f_value
                   << " K=" << describe_subset(exact.chosen_clusters);
                return {false, ss.str()};
            }
        }
        return {true, std::to_string(instances.size()) + " instances"};
    });
}

CheckResult check_ratio_separation(const CheckOptions& options) {
    return timed("ratio_separation", [&]() -> std::pair<bool, std::string> {
        Rng rng(derive_seed(options.seed, 0x01, 0));  // same stream as the oracle sweep
        std::vector<Clustering> instances = crafted_instances();
        for (int t = 0; t < options.oracle_trials; ++t) instances.push_back(random_clustering(rng, 12));

        std::size_t applicable = 0;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const Clustering& inst = instances[i];
            const ObjectiveReport report = objective_value(inst);
            if (report.chosen_clusters.size() == inst.sizes.size()) continue;  // no outside cluster
            ++applicable;
            std::vector<bool> inside(inst.sizes.size(), false);
            for (int k : report.chosen_clusters) inside[static_cast<std::size_t>(k)] = true;
            for (std::size_t k = 0; k < inst.sizes.size(); ++k) {
                if (!inside[k]) continue;
                for (std::size_t l = 0; l < inst.sizes.size(); ++l) {
                    if (inside[l]) continue;
                    // require a_k / c_k > a_l / c_l strictly, exactly
                    const u128 lhs = u128(inst.labeled_counts[k]) * inst.sizes[l];
                    const u128 rhs = u128(inst.labeled_counts[l]) * inst.sizes[k];
                    if (!(lhs > rhs)) {
                        std::ostringstream ss;
                        ss << "instance " << i << ": inside cluster " << k
                           << " does not strictly dominate outside cluster " << l;
                        return {false, ss.str()};
                    }
                }
            }
        }
        return {true, std::to_string(applicable) + " instances with a proper subset"};
    });
}

CheckResult check_mcar_selection(const CheckOptions& options) {
    return timed("mcar_selection", [&]() -> std::pair<bool, std::string> {
        Rng rng(derive_seed(options.seed, 0x02, 0));
        const double betas[] = {0.1, 0.25, 0.5};
        const std::size_t multiples[] = {10, 4, 2};

        for (int t = 0; t < options.mcar_trials; ++t) {
            const std::size_t which = rng.uniform_int(3);
            const double beta = betas[which];
            const int k = 1 + static_cast<int>(rng.uniform_int(12));
            const int k_positive = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
            std::vector<std::size_t> sizes(static_cast<std::size_t>(k));
            std::vector<std::size_t> labeled(static_cast<std::size_t>(k), 0);
            for (int i = 0; i < k; ++i) {
                sizes[static_cast<std::size_t>(i)] = multiples[which] * (1 + rng.uniform_int(5));
                if (i < k_positive)
                    labeled[static_cast<std::size_t>(i)] = static_cast<std::size_t>(
                        std::llround(beta * static_cast<double>(sizes[static_cast<std::size_t>(i)])));
            }
            const Clustering inst = Clustering::from_counts(sizes, labeled);
            const ObjectiveReport report = objective_value(inst);

            std::vector<int> expected(static_cast<std::size_t>(k_positive));
            std::iota(expected.begin(), expected.end(), 0);
            if (report.chosen_clusters != expected) {
                std::ostringstream ss;
                ss << "trial " << t << ": beta=" << beta << " expected "
                   << describe_subset(expected) << " got " << describe_subset(report.chosen_clusters);
                return {false, ss.str()};
            }
        }
        return {true, std::to_string(options.mcar_trials) + " constructed instances"};
    });
}

CheckResult check_beta_invariance(const CheckOptions& options) {
    return timed("beta_invariance", [&]() -> std::pair<bool, std::string> {
        Rng rng(derive_seed(options.seed, 0x03, 0));
        const std::uint64_t factors[] = {2, 3, 5};

        for (int t = 0; t < options.beta_trials; ++t) {
            // Keep labeled counts small enough that the x5 variant still fits.
            Clustering base;
            for (;;) {
                const int k = 2 + static_cast<int>(rng.uniform_int(11));
                std::vector<std::size_t> sizes(static_cast<std::size_t>(k));
                std::vector<std::size_t> labeled(static_cast<std::size_t>(k));
                std::size_t total = 0;
                for (int i = 0; i < k; ++i) {
                    sizes[static_cast<std::size_t>(i)] = 5 + rng.uniform_int(46);
                    labeled[static_cast<std::size_t>(i)] =
                        rng.uniform_int(sizes[static_cast<std::size_t>(i)] / 5 + 1);
                    total += labeled[static_cast<std::size_t>(i)];
                }
                if (total >= 1) {
                    base = Clustering::from_counts(std::move(sizes), std::move(labeled));
                    break;
                }
            }
            const ObjectiveReport before = objective_value(base);

            for (std::uint64_t factor : factors) {
                Clustering scaled = base;
                for (auto& v : scaled.labeled_counts) v *= factor;
                const ObjectiveReport after = objective_value(scaled);
                const bool same_subset = after.chosen_clusters == before.chosen_clusters;
                const bool hits_scaled = after.hits == factor * before.hits &&
                                         after.union_size == before.union_size &&
                                         after.labeled_total == factor * before.labeled_total;
                // f' == factor * f exactly: hits'^2 L C == factor hits^2 L' C'
                const u128 lhs = u128(after.hits) * after.hits * before.labeled_total * before.union_size;
                const u128 rhs = u128(factor) * before.hits * before.hits * after.labeled_total *
                                 after.union_size;
                if (!same_subset || !hits_scaled || lhs != rhs) {
                    std::ostringstream ss;
                    ss << "trial " << t << " factor " << factor << ": subset or scale mismatch";
                    return {false, ss.str()};
                }
            }
        }
        return {true, std::to_string(options.beta_trials) + " instances x 3 factors"};
    });
}

CheckResult check_repair_contract(const CheckOptions& options) {
    return timed("repair_contract", [&]() -> std::pair<bool, std::string> {
        Rng rng(derive_seed(options.seed, 0x04, 0));

        for (int t = 0; t < options.repair_trials; ++t) {
            const std::size_t d = 1 + rng.uniform_int(60);
            const bool unit = rng.bernoulli(0.5);
            std::vector<double> costs(d);
            double budget;
            if (unit) {
                std::fill(costs.begin(), costs.end(), 1.0);
                budget = static_cast<double>(1 + rng.uniform_int(d));
            } else {
                double total = 0.0, cheapest = std::numeric_limits<double>::infinity();
                for (double& c : costs) {
                    c = rng.uniform(0.1, 10.0);
                    total += c;
                    cheapest = std::min(cheapest, c);
                }
                budget = rng.uniform(cheapest, total * 1.05);
            }

            ThetaVector theta = init_theta(costs, budget);
            for (double& v : theta.theta) v = rng.uniform(theta.epsilon, 1.0 - theta.epsilon);

            FeatureMask mask;
            mask.costs = costs;
            mask.budget = budget;
            mask.bits.resize(d);
            for (auto& b : mask.bits) b = rng.bernoulli(0.5) ? 1 : 0;

            const FeatureMask repaired = repair(mask, theta, rng);
            if (!repaired.feasible() || !repaired.maximal()) {
                std::ostringstream ss;
                ss << "trial " << t << ": repaired mask not feasible-and-maximal (cost "
                   << repaired.total_cost() << ", budget " << budget << ")";
                return {false, ss.str()};
            }
            if (unit && repaired.count() != static_cast<std::size_t>(budget)) {
                std::ostringstream ss;
                ss << "trial " << t << ": unit costs, budget " << budget << ", popcount "
                   << repaired.count();
                return {false, ss.str()};
            }
        }
        return {true, std::to_string(options.repair_trials) + " random triples"};
    });
}

CheckResult check_mi_oracle(const CheckOptions& options) {
    return timed("mi_oracle", [&]() -> std::pair<bool, std::string> {
        Rng rng(derive_seed(options.seed, 0x05, 0));

        for (int t = 0; t < options.mi_trials; ++t) {
            const std::size_t n = 20 + rng.uniform_int(181);
            const std::size_t d = 1 + rng.uniform_int(3);
            Dataset data;
            data.n_rows = n;
            data.n_features = d;
            data.X.resize(n * d);
            for (std::size_t j = 0; j < d; ++j) {
                // Mix continuous columns with coarse ones that force merged
                // bin edges.
                const bool coarse = rng.bernoulli(0.5);
                const std::uint64_t levels = 2 + rng.uniform_int(5);
                for (std::size_t i = 0; i < n; ++i)
                    data.X[i * d + j] = coarse
                                            ? static_cast<double>(rng.uniform_int(levels))
                                            : rng.uniform(-1.0, 1.0);
            }
            data.s.resize(n);
            for (;;) {
                std::size_t ones = 0;
                for (auto& v : data.s) {
                    v = rng.bernoulli(0.3) ? 1 : 0;
                    ones += v;
                }
                if (ones >= 1 && ones < n) break;
            }

            std::vector<std::uint8_t> mask(d, 1);
            const double estimate = mi_score(data, mask);

            // Independent computation from a contingency table per feature.
            double reference = 0.0;
            std::vector<double> column(n);
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t i = 0; i < n; ++i) column[i] = data.X[i * d + j];
                const std::vector<int> bins = equal_frequency_bins(column, 10);
                std::map<std::pair<int, int>, double> joint;
                std::map<int, double> bin_marginal;
                std::map<int, double> label_marginal;
                for (std::size_t i = 0; i < n; ++i) {
                    joint[{bins[i], data.s[i]}] += 1.0;
                    bin_marginal[bins[i]] += 1.0;
                    label_marginal[data.s[i]] += 1.0;
                }
                double mi = 0.0;
                const double dn = static_cast<double>(n);
                for (const auto& [key, nxy] : joint)
                    mi += nxy / dn *
                          (std::log(nxy) + std::log(dn) - std::log(bin_marginal[key.first]) -
                           std::log(label_marginal[key.second]));
                reference += std::max(mi, 0.0);
            }
            reference /= static_cast<double>(d);

            if (std::abs(estimate - reference) > 1e-12) {
                std::ostringstream ss;
                ss << "trial " << t << ": estimate " << estimate << " vs reference " << reference;
                return {false, ss.str()};
            }
        }
        return {true, std::to_string(options.mi_trials) + " random instances"};
    });
}

CheckResult check_combined_score_cases(const CheckOptions&) {
    return timed("combined_score_cases", []() -> std::pair<bool, std::string> {
        ScoreLog log;
        log.append(1.0, 2.0);
        log.append(3.0, 2.0);
        if (combined_score(3.0, 2.0, log) != 5.0)
            return {false, "zero-spread mi log should use divisor 1"};

        ScoreLog log2;
        log2.append(0.0, 0.0);
        log2.append(2.0, 4.0);
        if (combined_score(2.0, 4.0, log2) != 4.0)
            return {false, "population stds 1 and 2 expected"};

        ScoreLog log3;
        log3.append(0.25, 0.5);
        if (combined_score(0.25, 0.5, log3) != 0.75)
            return {false, "single-entry logs should reduce to f + mi"};

        return {true, "3 worked examples"};
    });
}

}  // namespace

std::vector<CheckResult> run_checks(const CheckOptions& options) {
    std::vector<CheckResult> results;
    results.push_back(check_oracle_equivalence(options));
    results.push_back(check_ratio_separation(options));
    results.push_back(check_mcar_selection(options));
    results.push_back(check_beta_invariance(options));
    results.push_back(check_repair_contract(options));
    results.push_back(check_mi_oracle(options));
    results.push_back(check_combined_score_cases(options));
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace fscpu::check
