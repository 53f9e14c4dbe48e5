#include "gowerslab/arith.hpp"

#include "gowerslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gowerslab {

namespace {

constexpr std::uint64_t k_segment_threshold = std::uint64_t(1) << 26;

void sieve_linear(std::vector<std::uint32_t>& spf, std::uint64_t limit) {
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf[i] == 0) {
            spf[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            if (p > spf[i] || i * p > limit) break;
            spf[i * p] = p;
        }
    }
}

void sieve_segmented(std::vector<std::uint32_t>& spf, std::uint64_t limit) {
    // Base primes up to sqrt(limit), then mark segments with ascending primes
    // so the first mark on each composite is its smallest prime factor.
    std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
    while (root * root > limit) --root;
    while ((root + 1) * (root + 1) <= limit) ++root;
    std::vector<std::uint32_t> base(root + 1, 0);
    sieve_linear(base, root);
    std::vector<std::uint64_t> base_primes;
    for (std::uint64_t p = 2; p <= root; ++p)
        if (base[p] == p) base_primes.push_back(p);

    const std::uint64_t seg = k_segment_threshold;
    for (std::uint64_t lo = 2; lo <= limit; lo += seg) {
        std::uint64_t hi = std::min(limit, lo + seg - 1);
        for (std::uint64_t p : base_primes) {
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            for (std::uint64_t m = start; m <= hi; m += p)
                if (spf[m] == 0) spf[m] = static_cast<std::uint32_t>(p);
        }
        for (std::uint64_t n = lo; n <= hi; ++n)
            if (spf[n] == 0) spf[n] = static_cast<std::uint32_t>(n);
    }
}

void check_range(const FactorTable& t, std::uint64_t n, const char* who) {
    if (n < 1 || n > t.limit)
        throw std::invalid_argument(std::string(who) + ": n out of range [1, limit]");
}

} // namespace

FactorTable FactorTable::build(std::uint64_t limit) {
    if (limit < 2) throw std::invalid_argument("build_factor_table: limit must be >= 2");
    if (limit > (std::uint64_t(1) << 32) - 2)
        throw std::invalid_argument("build_factor_table: limit exceeds 32-bit factor storage");
    FactorTable t;
    t.limit = limit;
    t.spf.assign(limit + 1, 0);
    if (limit <= k_segment_threshold)
        sieve_linear(t.spf, limit);
    else
        sieve_segmented(t.spf, limit);
    return t;
}

std::vector<std::pair<std::uint64_t, int>> FactorTable::factor(std::uint64_t n) const {
    check_range(*this, n, "factor");
    std::vector<std::pair<std::uint64_t, int>> out;
    while (n > 1) {
        std::uint64_t p = spf[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    return out;
}

int moebius(const FactorTable& t, std::uint64_t n) {
    check_range(t, n, "moebius");
    int sign = 1;
    while (n > 1) {
        std::uint64_t p = t.spf[n];
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    return sign;
}

double von_mangoldt(const FactorTable& t, std::uint64_t n) {
    check_range(t, n, "von_mangoldt");
    if (n == 1) return 0.0;
    std::uint64_t p = t.spf[n];
    while (n % p == 0) n /= p;
    return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

std::uint64_t euler_phi(const FactorTable& t, std::uint64_t n) {
    check_range(t, n, "euler_phi");
    std::uint64_t result = n;
    while (n > 1) {
        std::uint64_t p = t.spf[n];
        result -= result / p;
        while (n % p == 0) n /= p;
    }
    return result;
}

std::vector<std::int64_t> primes_up_to(std::uint64_t n) {
    std::vector<std::int64_t> primes;
    if (n < 2) return primes;
    std::vector<bool> comp(n + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (!comp[i]) {
            primes.push_back(static_cast<std::int64_t>(i));
            for (std::uint64_t m = i * i; m <= n; m += i) comp[m] = true;
        }
    }
    return primes;
}

std::vector<std::int64_t> primes_below(double w) {
    if (w <= 2) return {};
    // strict p < w
    std::uint64_t cap = static_cast<std::uint64_t>(std::ceil(w)) + 1;
    auto ps = primes_up_to(cap);
    std::vector<std::int64_t> out;
    for (auto p : ps)
        if (static_cast<double>(p) < w) out.push_back(p);
    return out;
}

std::int64_t primorial(double w) {
    if (w < 0) throw std::invalid_argument("primorial: w must be >= 0");
    std::int64_t acc = 1;
    for (std::int64_t p : primes_below(w)) {
        if (acc > std::numeric_limits<std::int64_t>::max() / p)
            throw std::overflow_error("primorial: product of primes below w exceeds 64-bit range");
        acc *= p;
    }
    return acc;
}

double q_parameter(double N) {
    if (!std::isfinite(N) || N <= 1)
        throw std::invalid_argument("q_parameter: N must be finite and > 1");
    return std::exp(std::pow(std::log(N), 0.1));
}

std::vector<std::int8_t> moebius_table(const FactorTable& t, std::uint64_t N) {
    if (N > t.limit) throw std::invalid_argument("moebius_table: N exceeds table limit");
    std::vector<std::int8_t> mu(N + 1, 0);
    for (std::uint64_t n = 1; n <= N; ++n) mu[n] = static_cast<std::int8_t>(moebius(t, n));
    return mu;
}

std::vector<double> von_mangoldt_table(const FactorTable& t, std::uint64_t N, bool primes_only) {
    if (N > t.limit) throw std::invalid_argument("von_mangoldt_table: N exceeds table limit");
    std::vector<double> lam(N + 1, 0.0);
    for (std::uint64_t n = 2; n <= N; ++n) {
        if (primes_only) {
            if (t.spf[n] == n) lam[n] = std::log(static_cast<double>(n));
        } else {
            lam[n] = von_mangoldt(t, n);
        }
    }
    return lam;
}

GlobalParams GlobalParams::from_map(const std::map<std::string, std::string>& kv) {
    GlobalParams g;
    bool have_N = false;
    for (const auto& [key, val] : kv) {
        try {
            if (key == "N") {
                g.N = std::stod(val);
                have_N = true;
            } else if (key == "Q") {
                g.Q = std::stod(val);
                g.q_overridden = true;
            } else if (key == "w") {
                g.w = std::stod(val);
            } else if (key == "z") {
                g.z = std::stod(val);
            } else if (key == "W") {
                g.W = std::stoll(val);
            } else if (key == "b") {
                g.b = std::stoll(val);
            } else {
                throw std::invalid_argument("GlobalParams: unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (...) {
            throw std::invalid_argument("GlobalParams: bad value for key '" + key + "'");
        }
    }
    if (!have_N) throw std::invalid_argument("GlobalParams: key 'N' is required");
    if (!g.q_overridden) g.Q = q_parameter(g.N);
    if (kv.count("w") && !kv.count("z")) g.z = g.w;
    g.validate();
    return g;
}

GlobalParams GlobalParams::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("GlobalParams: cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("GlobalParams: malformed line '" + line + "'");
        auto strip = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r\n");
            auto b = s.find_last_not_of(" \t\r\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return from_map(kv);
}

void GlobalParams::validate() const {
    if (N <= 1) throw std::invalid_argument("GlobalParams: N must be > 1");
    if (Q <= 0) throw std::invalid_argument("GlobalParams: Q must be positive");
    if (!(2 <= w && w <= z && z <= Q))
        throw std::invalid_argument("GlobalParams: need 2 <= w <= z <= Q");
    if (W < 1) throw std::invalid_argument("GlobalParams: W must be >= 1");
    if (b < 1 || b > W) throw std::invalid_argument("GlobalParams: b must lie in [1, W]");
    if (std::gcd(b, W) != 1) throw std::invalid_argument("GlobalParams: gcd(b, W) must be 1");
}

} // namespace gowerslab
