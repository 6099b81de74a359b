#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fscpu/rng.hpp"

using namespace fscpu;

TEST_CASE("same seed reproduces the stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
        CHECK(a.uniform01() == b.uniform01());
        CHECK(a.normal(0.0, 1.0) == b.normal(0.0, 1.0));
    }
}

TEST_CASE("uniform01 stays in [0, 1)") {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal moments are roughly right") {
    Rng rng(2);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal(3.0, 2.0);
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.02));
    CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("uniform_int covers its range without bias") {
    Rng rng(3);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_int(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);  // ~5 sigma
}

TEST_CASE("sampling without replacement yields distinct indices") {
    Rng rng(4);
    auto picks = rng.sample_without_replacement(100, 30);
    CHECK(picks.size() == 30);
    std::sort(picks.begin(), picks.end());
    CHECK(std::adjacent_find(picks.begin(), picks.end()) == picks.end());
    for (auto p : picks) CHECK(p < 100);
}

TEST_CASE("categorical ignores zero weights") {
    Rng rng(5);
    const std::vector<double> weights{0.0, 2.0, 0.0, 1.0};
    std::vector<int> counts(4, 0);
    for (int i = 0; i < 30000; ++i) ++counts[rng.categorical(weights)];
    CHECK(counts[0] == 0);
    CHECK(counts[2] == 0);
    CHECK(counts[1] > counts[3]);
    CHECK(counts[1] + counts[3] == 30000);
    CHECK(std::abs(counts[1] - 20000) < 800);
}

TEST_CASE("derived seeds differ across streams and indices") {
    CHECK(derive_seed(0, 1, 0) != derive_seed(0, 1, 1));
    CHECK(derive_seed(0, 1, 0) != derive_seed(0, 2, 0));
    CHECK(derive_seed(0, 1, 0) != derive_seed(1, 1, 0));
    CHECK(derive_seed(7, 3, 2) == derive_seed(7, 3, 2));
}
