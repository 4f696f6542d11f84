#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "evrobust/rng.hpp"

using evrobust::CounterRng;

TEST_CASE("same key reproduces the same sequence") {
    CounterRng a(42, 7, 3);
    CounterRng b(42, 7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams differ") {
    CounterRng base(42);
    CHECK(base.substream(0).next_u64() != base.substream(1).next_u64());
    CHECK(CounterRng(42, 1).next_u64() != CounterRng(42, 2).next_u64());
    CHECK(CounterRng(1).next_u64() != CounterRng(2).next_u64());
}

TEST_CASE("uniform moments") {
    CounterRng rng(7);
    const int n = 100000;
    double sum = 0.0;
    double mn = 1.0, mx = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        sum += u;
        mn = std::min(mn, u);
        mx = std::max(mx, u);
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(mn >= 0.0);
    CHECK(mx < 1.0);
}

TEST_CASE("normal moments") {
    CounterRng rng(11);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson moments across both samplers") {
    for (double lambda : {0.7, 4.0, 35.0}) {
        CounterRng rng(13, static_cast<std::uint64_t>(lambda * 10));
        const int n = 100000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(lambda));
            sum += k;
            sq += k * k;
        }
        const double mean = sum / n;
        const double var = sq / n - mean * mean;
        CHECK(mean == doctest::Approx(lambda).epsilon(0.02));
        CHECK(var == doctest::Approx(lambda).epsilon(0.05));
    }
    CounterRng rng(13);
    CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("bernoulli endpoints are exact") {
    CounterRng rng(17);
    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.bernoulli(1.0));
        CHECK_FALSE(rng.bernoulli(0.0));
    }
}

TEST_CASE("uniform_index stays in range and covers it") {
    CounterRng rng(19);
    bool seen[10] = {};
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.uniform_index(10);
        REQUIRE(v < 10);
        seen[v] = true;
    }
    for (bool s : seen) CHECK(s);
}
