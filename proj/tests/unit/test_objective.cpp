#include "doctest.h"

#include <chrono>
#include <cmath>
#include <numeric>

#include "fscpu/dataset.hpp"
#include "fscpu/errors.hpp"
#include "fscpu/objective.hpp"
#include "fscpu/rng.hpp"
#include "fscpu/serialize.hpp"

using namespace fscpu;

namespace {

Clustering random_instance(Rng& rng, int max_k) {
    for (;;) {
        const int k = 2 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_k - 1)));
        std::vector<std::size_t> sizes(static_cast<std::size_t>(k));
        std::vector<std::size_t> labeled(static_cast<std::size_t>(k));
        std::size_t total = 0;
        for (int i = 0; i < k; ++i) {
            sizes[static_cast<std::size_t>(i)] = 1 + rng.uniform_int(50);
            labeled[static_cast<std::size_t>(i)] = rng.uniform_int(sizes[static_cast<std::size_t>(i)] + 1);
            total += labeled[static_cast<std::size_t>(i)];
        }
        if (total >= 1) return Clustering::from_counts(std::move(sizes), std::move(labeled));
    }
}

}  // namespace

TEST_CASE("perfect purity and recall give f = 1") {
    const auto c = Clustering::from_counts({10, 10}, {10, 0});
    const ObjectiveReport report = objective_value(c);
    CHECK(report.f_value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(report.chosen_clusters == std::vector<int>{0});
    CHECK(report.recall == 1.0);
    CHECK(report.precision == 1.0);
}

TEST_CASE("three-cluster worked example stops at the best prefix") {
    // sizes [10,10,10], labeled [8,4,0]: prefixes score 8^2/(12*10), 12^2/(12*20),
    // 12^2/(12*30); the middle one (0.6) wins.
    const auto c = Clustering::from_counts({10, 10, 10}, {8, 4, 0});
    const ObjectiveReport report = objective_value(c);
    CHECK(report.f_value == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(report.chosen_clusters == std::vector<int>{0, 1});
    CHECK(report.hits == 12);
    CHECK(report.union_size == 20);
    CHECK(report.labeled_total == 12);

    const ObjectiveReport exact = brute_force_best_subset(c);
    CHECK(same_f_value(report, exact));
    CHECK(exact.chosen_clusters == report.chosen_clusters);
}

TEST_CASE("single cluster scores L/n") {
    const auto c = Clustering::from_counts({7}, {3});
    const ObjectiveReport report = brute_force_best_subset(c);
    CHECK(report.f_value == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
    CHECK(report.chosen_clusters == std::vector<int>{0});
}

TEST_CASE("prefix scan survives a dip in the prefix values") {
    // Ratios 1, 0.2, 0.2: the two-cluster prefix scores below the first one,
    // but the full set scores above it. A first-decrease early stop fails here.
    const auto c = Clustering::from_counts({1, 10, 10}, {1, 2, 2});
    const ObjectiveReport report = objective_value(c);
    const ObjectiveReport exact = brute_force_best_subset(c);
    CHECK(report.chosen_clusters == std::vector<int>{0, 1, 2});
    CHECK(same_f_value(report, exact));
    CHECK(exact.chosen_clusters == report.chosen_clusters);
}

TEST_CASE("exact value ties resolve toward the larger subset") {
    // {0} and {0,1} both score 1^2/1 = 2^2/4; the pair wins.
    const auto c = Clustering::from_counts({1, 3}, {1, 1});
    CHECK(objective_value(c).chosen_clusters == std::vector<int>{0, 1});
    CHECK(brute_force_best_subset(c).chosen_clusters == std::vector<int>{0, 1});
}

TEST_CASE("prefix search equals the exhaustive search on random instances") {
    Rng rng(7);
    for (int t = 0; t < 1000; ++t) {
        const Clustering c = random_instance(rng, 12);
        const ObjectiveReport fast = objective_value(c);
        const ObjectiveReport exact = brute_force_best_subset(c);
        REQUIRE(same_f_value(fast, exact));
        REQUIRE(fast.chosen_clusters == exact.chosen_clusters);
        REQUIRE(fast.f_value == doctest::Approx(fast.recall * fast.precision).epsilon(1e-12));
        REQUIRE(!fast.chosen_clusters.empty());
        REQUIRE(fast.f_value >= 0.0);
        REQUIRE(fast.f_value <= 1.0);
    }
}

TEST_CASE("chosen ratios strictly dominate the rest") {
    Rng rng(11);
    for (int t = 0; t < 500; ++t) {
        const Clustering c = random_instance(rng, 10);
        const ObjectiveReport report = objective_value(c);
        if (report.chosen_clusters.size() == c.sizes.size()) continue;
        std::vector<bool> inside(c.sizes.size(), false);
        for (int k : report.chosen_clusters) inside[static_cast<std::size_t>(k)] = true;
        double min_inside = 2.0, max_outside = -1.0;
        for (std::size_t k = 0; k < c.sizes.size(); ++k) {
            const double ratio = report.per_cluster_ratio[k];
            if (inside[k])
                min_inside = std::min(min_inside, ratio);
            else
                max_outside = std::max(max_outside, ratio);
        }
        REQUIRE(min_inside > max_outside);
    }
}

TEST_CASE("constant-ratio leading blocks are selected whole") {
    // When the first blocks all carry the same labeled ratio and the rest
    // none, the chosen subset is exactly the leading blocks.
    const auto c = Clustering::from_counts({10, 20, 30, 40}, {5, 10, 0, 0});
    const ObjectiveReport report = objective_value(c);
    CHECK(report.chosen_clusters == std::vector<int>{0, 1});
}

TEST_CASE("scaling all labeled counts keeps the subset and scales f") {
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        Clustering base;
        for (;;) {
            const int k = 2 + static_cast<int>(rng.uniform_int(10));
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
        for (std::size_t factor : {2, 3, 5}) {
            Clustering scaled = base;
            for (auto& v : scaled.labeled_counts) v *= factor;
            const ObjectiveReport after = objective_value(scaled);
            REQUIRE(after.chosen_clusters == before.chosen_clusters);
            REQUIRE(after.hits == factor * before.hits);
            REQUIRE(after.union_size == before.union_size);
            // doubles are exact here: hits and denominators are small integers
            REQUIRE(after.f_value ==
                    doctest::Approx(static_cast<double>(factor) * before.f_value).epsilon(1e-12));
        }
    }
}

TEST_CASE("f reaches 1 exactly when some clusters cover exactly the labeled rows") {
    const auto covered = Clustering::from_counts({5, 10, 5}, {5, 0, 5});
    CHECK(objective_value(covered).f_value == 1.0);
    const auto not_covered = Clustering::from_counts({5, 10}, {4, 1});
    CHECK(objective_value(not_covered).f_value < 1.0);
}

TEST_CASE("no labeled data is rejected") {
    auto c = Clustering::from_counts({5, 5}, {0, 0});
    CHECK_THROWS_AS(objective_value(c), DataError);
}

TEST_CASE("exhaustive search refuses large K") {
    std::vector<std::size_t> sizes(21, 2), labeled(21, 1);
    const auto c = Clustering::from_counts(sizes, labeled);
    CHECK_THROWS_AS(brute_force_best_subset(c), DataError);
}

TEST_CASE("prefix search stays fast for large K") {
    // 2^K would be hopeless at K = 100000; the sort-and-scan finishes instantly.
    Rng rng(3);
    const std::size_t k = 100000;
    std::vector<std::size_t> sizes(k), labeled(k);
    for (std::size_t i = 0; i < k; ++i) {
        sizes[i] = 1 + rng.uniform_int(50);
        labeled[i] = rng.uniform_int(sizes[i] + 1);
    }
    const auto c = Clustering::from_counts(std::move(sizes), std::move(labeled));
    const auto start = std::chrono::steady_clock::now();
    const ObjectiveReport report = objective_value(c);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(report.f_value > 0.0);
    CHECK(seconds < 2.0);
}

TEST_CASE("binned mutual information of the label with itself is its entropy") {
    Dataset data;
    data.n_rows = 200;
    data.n_features = 1;
    data.X.resize(200);
    data.s.resize(200);
    for (std::size_t i = 0; i < 200; ++i) {
        data.s[i] = i < 80 ? 1 : 0;
        data.X[i] = static_cast<double>(data.s[i]);
    }
    const double p = 0.4;
    const double entropy = -p * std::log(p) - (1 - p) * std::log(1 - p);
    const std::vector<std::uint8_t> mask{1};
    CHECK(mi_score(data, mask) == doctest::Approx(entropy).epsilon(1e-12));
}

TEST_CASE("a constant column carries no information") {
    Dataset data;
    data.n_rows = 50;
    data.n_features = 2;
    data.X.assign(100, 0.0);
    data.s.assign(50, 0);
    for (std::size_t i = 0; i < 50; ++i) {
        data.s[i] = i % 3 == 0 ? 1 : 0;
        data.X[i * 2] = 4.2;                         // constant
        data.X[i * 2 + 1] = static_cast<double>(i);  // informative about nothing but order
    }
    const std::vector<std::uint8_t> constant_only{1, 0};
    CHECK(mi_score(data, constant_only) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("empty mask is rejected") {
    Dataset data;
    data.n_rows = 4;
    data.n_features = 1;
    data.X = {0.0, 1.0, 2.0, 3.0};
    data.s = {1, 0, 0, 1};
    const std::vector<std::uint8_t> empty{0};
    CHECK_THROWS_AS(mi_score(data, empty), DataError);
    CHECK_THROWS_AS(evaluate_mask(data, empty, ClusterConfig{}, 0), DataError);
}

TEST_CASE("equal-frequency binning merges duplicate edges") {
    const std::vector<double> constant(40, 1.5);
    const std::vector<int> bins = equal_frequency_bins(constant, 10);
    for (int b : bins) CHECK(b == 0);

    std::vector<double> binary(40);
    for (std::size_t i = 0; i < 40; ++i) binary[i] = i < 30 ? 0.0 : 1.0;
    const std::vector<int> two = equal_frequency_bins(binary, 10);
    for (std::size_t i = 0; i < 40; ++i) CHECK(two[i] == (binary[i] > 0.0 ? 1 : 0));
}

TEST_CASE("combined score normalizes by the log spread") {
    ScoreLog log;
    log.append(1.0, 2.0);
    log.append(3.0, 2.0);
    CHECK(combined_score(3.0, 2.0, log) == 5.0);  // mi spread is zero -> divisor 1

    ScoreLog log2;
    log2.append(0.0, 0.0);
    log2.append(2.0, 4.0);
    CHECK(combined_score(2.0, 4.0, log2) == 4.0);  // stds 1 and 2

    ScoreLog log3;
    log3.append(0.25, 0.5);
    CHECK(combined_score(0.25, 0.5, log3) == 0.75);  // single entry -> f + mi
}

TEST_CASE("objective reports serialize with their documented keys") {
    const auto c = Clustering::from_counts({10, 10, 10}, {8, 4, 0});
    ObjectiveReport report = objective_value(c);
    report.mi_value = 0.25;
    report.combined_value = 1.5;
    const auto j = to_json(report);
    CHECK(j["f"] == 0.6);
    CHECK(j["recall"] == 1.0);
    CHECK(j["precision"] == 0.6);
    CHECK(j["chosen_clusters"] == std::vector<int>{0, 1});
    CHECK(j["ratios"].size() == 3);
    CHECK(j["mi"] == 0.25);
    CHECK(j["combined"] == 1.5);

    const ObjectiveReport bare = objective_value(c);
    CHECK(to_json(bare)["mi"].is_null());
}

TEST_CASE("masks over ground-truth columns beat all-irrelevant masks") {
    SyntheticSpec spec;
    spec.cluster_assumption = true;
    spec.labeled_rate = 0.4;
    spec.n_negative_clusters = 8;
    spec.n_positive_clusters = 1;
    spec.seed = 21;
    Dataset data = generate_clustered(spec);
    data = subsample_rows(data, 1200, 99);
    data = apply_minmax(data, fit_minmax(data));

    std::vector<std::uint8_t> relevant = data.relevant_truth;
    std::vector<std::uint8_t> irrelevant(data.n_features);
    for (std::size_t j = 0; j < data.n_features; ++j) irrelevant[j] = relevant[j] ? 0 : 1;

    ClusterConfig config;
    config.max_iter = 30;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const double f_relevant = evaluate_mask(data, relevant, config, seed).f_value;
        const double f_irrelevant = evaluate_mask(data, irrelevant, config, seed).f_value;
        REQUIRE(f_relevant >= f_irrelevant);
    }
}

TEST_CASE("mask evaluation is deterministic") {
    SyntheticSpec spec;
    spec.seed = 5;
    spec.labeled_rate = 0.4;
    Dataset data = generate_clustered(spec);
    data = subsample_rows(data, 400, 1);
    data = apply_minmax(data, fit_minmax(data));

    std::vector<std::uint8_t> mask(data.n_features, 0);
    for (std::size_t j = 0; j < data.n_features; j += 2) mask[j] = 1;
    ClusterConfig config;
    config.max_iter = 20;
    const ObjectiveReport a = evaluate_mask(data, mask, config, 17);
    const ObjectiveReport b = evaluate_mask(data, mask, config, 17);
    CHECK(a.f_value == b.f_value);
    CHECK(a.chosen_clusters == b.chosen_clusters);

    std::vector<std::uint8_t> all(data.n_features, 1);
    CHECK_NOTHROW(evaluate_mask(data, all, config, 3));
}
