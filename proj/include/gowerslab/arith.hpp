#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gowerslab {

// Smallest-prime-factor table for 2 <= n <= limit. Immutable after build and
// shareable across workers. Construction is single-threaded; above 2^26
// entries the sieve runs segmented to bound auxiliary memory.
struct FactorTable {
    std::uint64_t limit = 0;
    std::vector<std::uint32_t> spf; // spf[n] = smallest prime factor; spf[0] = spf[1] = 0

    static FactorTable build(std::uint64_t limit);

    bool is_prime(std::uint64_t n) const { return n >= 2 && n <= limit && spf[n] == n; }

    // (prime, exponent) pairs in ascending prime order
    std::vector<std::pair<std::uint64_t, int>> factor(std::uint64_t n) const;
};

int moebius(const FactorTable& t, std::uint64_t n);
double von_mangoldt(const FactorTable& t, std::uint64_t n);
std::uint64_t euler_phi(const FactorTable& t, std::uint64_t n);

// Product of all primes strictly below w; empty product = 1. Overflow of the
// 64-bit result throws std::overflow_error.
std::int64_t primorial(double w);

// exp((log N)^{1/10})
double q_parameter(double N);

// Primes p < w, ascending.
std::vector<std::int64_t> primes_below(double w);

// Primes p <= n, ascending (simple bit sieve, independent of FactorTable).
std::vector<std::int64_t> primes_up_to(std::uint64_t n);

// Bulk tables over [1, N]; index n holds the value at n (index 0 unused = 0).
std::vector<std::int8_t> moebius_table(const FactorTable& t, std::uint64_t N);
std::vector<double> von_mangoldt_table(const FactorTable& t, std::uint64_t N, bool primes_only = false);

// Run-scale parameters, loadable from a plain key=value file
// (keys: N, Q, w, z, W, b). Q defaults to q_parameter(N) when absent;
// an explicit Q is recorded as an override.
struct GlobalParams {
    double N = 0;
    double Q = 0;
    double w = 2;
    double z = 2;
    std::int64_t W = 1;
    std::int64_t b = 1;
    bool q_overridden = false;

    static GlobalParams from_file(const std::string& path);
    static GlobalParams from_map(const std::map<std::string, std::string>& kv);
    void validate() const;
};

} // namespace gowerslab
