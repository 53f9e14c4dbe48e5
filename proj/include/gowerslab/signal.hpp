#pragma once

#include "gowerslab/arith.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>

namespace gowerslab {

enum class Domain : std::uint8_t {
    cyclic = 0,   // Z/MZ, values[j] = f(j), 0 <= j < M
    interval = 1, // [N] = {1..N}, values[j] = f(j+1)
    coset = 2,    // {a + d*j} in [1, N], values[j] = f(a + d*j)
};

// Dense complex signal over one of the three supported domains. Values are
// checked finite at construction; the real_valued flag additionally asserts
// vanishing imaginary parts.
struct ArithSignal {
    Domain domain = Domain::interval;
    std::int64_t size_param = 0; // M for cyclic, N for interval/coset
    std::int64_t coset_a = 0;
    std::int64_t coset_d = 1;
    bool real_valued = false;
    Eigen::ArrayXcd values;
    std::string label;

    std::int64_t length() const { return values.size(); }

    // actual integer point behind index j
    std::int64_t point(std::int64_t j) const {
        switch (domain) {
            case Domain::cyclic: return j;
            case Domain::interval: return j + 1;
            case Domain::coset: return coset_a + coset_d * j;
        }
        return j;
    }

    void validate() const;
};

ArithSignal make_cyclic_signal(std::int64_t M, Eigen::ArrayXcd values, std::string label = {});
ArithSignal make_interval_signal(std::int64_t N, Eigen::ArrayXcd values, std::string label = {});
ArithSignal make_coset_signal(std::int64_t N, std::int64_t a, std::int64_t d, Eigen::ArrayXcd values,
                              std::string label = {});

// constant-one signal on the chosen domain
ArithSignal ones_signal(Domain domain, std::int64_t size);

// Moebius and von Mangoldt signals on [N] (primes_only drops prime powers)
ArithSignal mu_signal(const FactorTable& t, std::int64_t N);
ArithSignal lambda_signal(const FactorTable& t, std::int64_t N, bool primes_only = false);

// pointwise multiply by e(theta * n) with n the actual integer point
ArithSignal modulate(const ArithSignal& f, double theta);

// Sum of f(n) e(n*theta) over the progression n = a + q*j inside
// [range_lo, range_hi] intersected with f's domain points.
std::complex<double> exponential_sum(const ArithSignal& f, std::int64_t a, std::int64_t q,
                                     std::int64_t range_lo, std::int64_t range_hi, double theta);

// CSV round trip, columns: index, re, im
void write_signal_csv(const ArithSignal& f, const std::string& path);
ArithSignal read_signal_csv(const std::string& path);

// Compact binary dump: magic, domain tag, length header, then little-endian
// 64-bit float pairs.
void write_signal_binary(const ArithSignal& f, const std::string& path);
ArithSignal read_signal_binary(const std::string& path);

} // namespace gowerslab
