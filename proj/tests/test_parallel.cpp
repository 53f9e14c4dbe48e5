#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gowerslab/gowers.hpp"
#include "gowerslab/parallel.hpp"
#include "gowerslab/signal.hpp"

#include <cstring>
#include <random>
#include <vector>

using namespace gowerslab;

TEST_CASE("tree sum combines pairwise in index order") {
    std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(tree_sum(xs) == ((1.0 + 2.0) + (3.0 + 4.0)) + 5.0);
    std::vector<double> empty;
    CHECK(tree_sum(empty) == 0.0);
    std::vector<double> one = {7.5};
    CHECK(tree_sum(one) == 7.5);
}

TEST_CASE("blocked reduction is independent of the worker count, bit for bit") {
    std::mt19937_64 rng(42);
    std::vector<double> data(100000);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& x : data) x = u(rng);

    auto run = [&](int workers) {
        set_worker_count(workers);
        double r = blocked_reduce<double>(data.size(), 1024, [&](std::size_t lo, std::size_t hi) {
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) acc += data[i] * data[i] + 0.1 * data[i];
            return acc;
        });
        set_worker_count(1);
        return r;
    };
    double r1 = run(1), r4 = run(4), r8 = run(8);
    CHECK(std::memcmp(&r1, &r4, sizeof r1) == 0);
    CHECK(std::memcmp(&r1, &r8, sizeof r1) == 0);
}

TEST_CASE("norm evaluations produce identical bits for any worker count") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::ArrayXcd v(64);
    for (int i = 0; i < 64; ++i) v[i] = std::complex<double>(u(rng), u(rng));
    ArithSignal f = make_cyclic_signal(64, v);

    auto run = [&](int workers) {
        set_worker_count(workers);
        double r = norm_group_fast(f, 3).value;
        set_worker_count(1);
        return r;
    };
    double r1 = run(1), r4 = run(4), r8 = run(8);
    CHECK(std::memcmp(&r1, &r4, sizeof r1) == 0);
    CHECK(std::memcmp(&r1, &r8, sizeof r1) == 0);
}

TEST_CASE("blocked apply fills every slot exactly once") {
    set_worker_count(4);
    std::vector<int> hits(5000, 0);
    blocked_apply(hits.size(), 64, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) hits[i] += 1;
    });
    set_worker_count(1);
    for (int h : hits) CHECK(h == 1);
}
