#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "spr/rng.hpp"

using spr::RngState;

TEST_SUITE("rng") {

TEST_CASE("same seed reproduces the same stream") {
    RngState a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("stream depends only on the counter, not on call grouping") {
    RngState a(7);
    std::vector<std::uint64_t> one_by_one;
    for (int i = 0; i < 8; ++i) one_by_one.push_back(a.next_u64());

    RngState b(7);
    b.next_double();  // consumes exactly one word
    RngState c(7);
    c.next_u64();
    for (int i = 1; i < 8; ++i) CHECK(b.next_u64() == one_by_one[i]);
    CHECK(c.counter() == 1);
}

TEST_CASE("different seeds give different streams") {
    RngState a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("uniforms live in [0, 1)") {
    RngState rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("gaussians have roughly standard moments") {
    RngState rng(11);
    const int n = 4000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.1);
    CHECK(std::abs(var - 1.0) < 0.15);
}

TEST_CASE("unit vectors are unit") {
    RngState rng(5);
    for (int d = 1; d <= 6; ++d) {
        const Eigen::VectorXd v = rng.unit_vector(d);
        CHECK(v.size() == d);
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("forks are deterministic and mutually distinct") {
    RngState parent(99);
    parent.next_u64();  // fork must not depend on the parent's position
    RngState f1 = parent.fork(0);
    RngState f2 = parent.fork(1);
    RngState f1again = RngState(99).fork(0);
    CHECK(f1.next_u64() == f1again.next_u64());
    CHECK(f1.seed() != f2.seed());

    std::set<std::uint64_t> seeds;
    for (std::uint64_t k = 0; k < 50; ++k) seeds.insert(parent.fork(k).seed());
    CHECK(seeds.size() == 50);
}

}  // TEST_SUITE
