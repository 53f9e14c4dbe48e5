#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

namespace gowerslab {

// Worker count used by all parallel loops. Resolution order:
// set_worker_count() > GOWERS_LAB_THREADS env var > 1.
int worker_count();
void set_worker_count(int n);

// Pairwise tree sum in index order. This is a determinism contract, not an
// accuracy tweak: reductions must produce identical bits for every worker
// count, so partials are always combined in this fixed order.
template <typename T>
T tree_sum(std::span<T> xs) {
    if (xs.empty()) return T{};
    std::vector<T> cur(xs.begin(), xs.end());
    while (cur.size() > 1) {
        std::size_t half = (cur.size() + 1) / 2;
        std::vector<T> nxt(half);
        for (std::size_t i = 0; i + 1 < cur.size(); i += 2) nxt[i / 2] = cur[i] + cur[i + 1];
        if (cur.size() % 2) nxt[half - 1] = cur.back();
        cur = std::move(nxt);
    }
    return cur[0];
}

template <typename T>
T tree_sum(std::vector<T>& xs) {
    return tree_sum(std::span<T>(xs));
}

// Deterministic blocked reduction over [0, n). The block grid depends only on
// n and block_size, never on the worker count. Each block [lo, hi) is handled
// sequentially by exactly one worker via fn(lo, hi) -> T; the block partials
// are then tree-summed in block order. Safe for any (over)subscription.
template <typename T, typename Fn>
T blocked_reduce(std::size_t n, std::size_t block_size, Fn&& fn) {
    if (n == 0) return T{};
    if (block_size == 0) block_size = 1;
    std::size_t nblocks = (n + block_size - 1) / block_size;
    std::vector<T> partials(nblocks);
    int workers = worker_count();
    if (workers <= 1 || nblocks == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) {
            std::size_t lo = b * block_size;
            std::size_t hi = lo + block_size < n ? lo + block_size : n;
            partials[b] = fn(lo, hi);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                std::size_t b = next.fetch_add(1);
                if (b >= nblocks) break;
                std::size_t lo = b * block_size;
                std::size_t hi = lo + block_size < n ? lo + block_size : n;
                partials[b] = fn(lo, hi);
            }
        };
        std::size_t nthreads = std::min<std::size_t>(workers, nblocks);
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return tree_sum(partials);
}

// Deterministic blocked for-each over [0, n): fn(lo, hi) fills disjoint
// output slots, so scheduling order cannot matter.
template <typename Fn>
void blocked_apply(std::size_t n, std::size_t block_size, Fn&& fn) {
    if (n == 0) return;
    if (block_size == 0) block_size = 1;
    std::size_t nblocks = (n + block_size - 1) / block_size;
    int workers = worker_count();
    if (workers <= 1 || nblocks == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) {
            std::size_t lo = b * block_size;
            std::size_t hi = lo + block_size < n ? lo + block_size : n;
            fn(lo, hi);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= nblocks) break;
            std::size_t lo = b * block_size;
            std::size_t hi = lo + block_size < n ? lo + block_size : n;
            fn(lo, hi);
        }
    };
    std::size_t nthreads = std::min<std::size_t>(workers, nblocks);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

} // namespace gowerslab
