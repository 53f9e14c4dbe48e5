#include "gowerslab/gowers.hpp"

#include "gowerslab/errors.hpp"
#include "gowerslab/fft.hpp"
#include "gowerslab/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gowerslab {

namespace {

using cd = std::complex<double>;

void require_cyclic(const ArithSignal& f, const char* who) {
    if (f.domain != Domain::cyclic)
        throw std::invalid_argument(std::string(who) + ": signal must live on Z/MZ");
}

void require_interval(const ArithSignal& f, const char* who) {
    if (f.domain != Domain::interval)
        throw std::invalid_argument(std::string(who) + ": signal must live on an interval [N]");
}

void require_degree(int k, const char* who) {
    if (k < 1 || k > 24)
        throw std::invalid_argument(std::string(who) + ": degree k must be in [1, 24]");
}

double clamp_raised(double raised, const char* who) {
    if (raised < 0.0) {
        if (raised < -1e-12)
            throw numeric_consistency_error(std::string(who) + ": correlation average " +
                                            std::to_string(raised) +
                                            " is negative beyond rounding");
        return 0.0;
    }
    return raised;
}

// Fixed-order chunked reduction of |z|^4 over a spectrum; the chunk grid and
// the pairwise combine order never change, so results are bit-stable.
double fourth_moment_chunked(const std::vector<cd>& xs) {
    const std::size_t chunk = 65536;
    std::size_t nchunks = (xs.size() + chunk - 1) / chunk;
    if (nchunks == 0) return 0.0;
    std::vector<double> partials(nchunks, 0.0);
    for (std::size_t b = 0; b < nchunks; ++b) {
        std::size_t lo = b * chunk, hi = std::min(xs.size(), lo + chunk);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            double m2 = std::norm(xs[i]);
            acc += m2 * m2;
        }
        partials[b] = acc;
    }
    return tree_sum(partials);
}

// Sigma-form degree-2 norm: sum_h |A(h)|^2 = (1/M) sum_xi |F(xi)|^4.
double sigma_u2(const Eigen::ArrayXcd& v, Eigen::FFT<double>& fft) {
    if (v.size() == 1) {
        double m2 = std::norm(v[0]);
        return m2 * m2;
    }
    std::vector<cd> in(v.data(), v.data() + v.size()), out;
    fft.fwd(out, in);
    return fourth_moment_chunked(out) / static_cast<double>(v.size());
}

void difference_signal(const Eigen::ArrayXcd& v, std::int64_t hm, Eigen::ArrayXcd& out) {
    std::int64_t M = v.size();
    for (std::int64_t x = 0; x + hm < M; ++x) out[x] = v[x] * std::conj(v[x + hm]);
    for (std::int64_t x = M - hm; x < M; ++x) out[x] = v[x] * std::conj(v[x + hm - M]);
}

// Sequential derivative recursion below the parallel top level. In Z mode
// shifts run over |h| < N at every depth (difference signals keep their
// support inside the embedded window), otherwise over the whole group.
double sigma_rec(const Eigen::ArrayXcd& v, int k, bool zmode, std::int64_t N,
                 Eigen::FFT<double>& fft) {
    if (k == 2) return sigma_u2(v, fft);
    std::int64_t M = v.size();
    std::int64_t hlo = zmode ? -(N - 1) : 0;
    std::int64_t hhi = zmode ? N - 1 : M - 1;
    Eigen::ArrayXcd d(M);
    double acc = 0.0;
    for (std::int64_t h = hlo; h <= hhi; ++h) {
        std::int64_t hm = ((h % M) + M) % M;
        difference_signal(v, hm, d);
        acc += sigma_rec(d, k - 1, zmode, N, fft);
    }
    return acc;
}

// Sigma-form degree-k norm, k >= 2, with the top shift loop on the worker
// pool (fixed block grid, block partials tree-summed in order).
double sigma_norm(const Eigen::ArrayXcd& v, int k, bool zmode, std::int64_t N) {
    if (k == 2) {
        Eigen::FFT<double> fft;
        return sigma_u2(v, fft);
    }
    std::int64_t M = v.size();
    std::size_t hcount = static_cast<std::size_t>(zmode ? 2 * N - 1 : M);
    return blocked_reduce<double>(hcount, 8, [&](std::size_t lo, std::size_t hi) {
        Eigen::FFT<double> fft;
        Eigen::ArrayXcd d(M);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            std::int64_t h = zmode ? static_cast<std::int64_t>(i) - (N - 1)
                                   : static_cast<std::int64_t>(i);
            std::int64_t hm = ((h % M) + M) % M;
            difference_signal(v, hm, d);
            acc += sigma_rec(d, k - 1, zmode, N, fft);
        }
        return acc;
    });
}

// Sigma-form Z-norm of an interval signal through the no-wraparound cyclic
// embedding of order >= 4kN. For k = 1 returns |sum f|^2.
double sigma_norm_z(const ArithSignal& f, int k) {
    std::int64_t N = f.size_param;
    if (N == 0 || f.length() == 0) return 0.0;
    if (k == 1) {
        cd s = 0.0;
        for (std::int64_t j = 0; j < f.length(); ++j) s += f.values[j];
        return std::norm(s);
    }
    std::uint64_t want = std::max<std::uint64_t>(8, 4ull * static_cast<std::uint64_t>(k) *
                                                        static_cast<std::uint64_t>(N));
    std::int64_t M0 = static_cast<std::int64_t>(std::bit_ceil(want));
    Eigen::ArrayXcd emb = Eigen::ArrayXcd::Zero(M0);
    for (std::int64_t j = 0; j < f.length(); ++j) emb[f.point(j)] = f.values[j];
    return sigma_norm(emb, k, true, N);
}

// Shared box enumeration core: Sigma-form sum over (x, h) of the conjugated
// corner products, family indexed by the corner bitmask.
cd sigma_box_group(const std::vector<const Eigen::ArrayXcd*>& fam, std::int64_t M, int k,
                   std::uint64_t budget, const char* who) {
    long double tuples = std::pow(static_cast<long double>(M), k + 1);
    if (tuples > static_cast<long double>(budget))
        throw resource_error(std::string(who) + ": enumeration over M^(k+1) = " +
                             std::to_string(static_cast<double>(tuples)) +
                             " tuples exceeds the budget");
    int corners = 1 << k;
    return blocked_reduce<cd>(static_cast<std::size_t>(M), 1, [&](std::size_t lo, std::size_t hi) {
        cd acc = 0.0;
        std::vector<std::int64_t> h(static_cast<std::size_t>(k), 0);
        std::vector<std::int64_t> shift(static_cast<std::size_t>(corners));
        for (h[0] = static_cast<std::int64_t>(lo); h[0] < static_cast<std::int64_t>(hi); ++h[0]) {
            std::fill(h.begin() + 1, h.end(), 0);
            for (;;) {
                for (int w = 0; w < corners; ++w) {
                    std::int64_t s = 0;
                    for (int i = 0; i < k; ++i)
                        if ((w >> i) & 1) s += h[static_cast<std::size_t>(i)];
                    shift[static_cast<std::size_t>(w)] = s % M;
                }
                cd inner = 0.0;
                for (std::int64_t x = 0; x < M; ++x) {
                    cd prod = 1.0;
                    for (int w = 0; w < corners; ++w) {
                        cd val = (*fam[static_cast<std::size_t>(w)])[
                            (x + shift[static_cast<std::size_t>(w)]) % M];
                        prod *= (std::popcount(static_cast<unsigned>(w)) & 1)
                                    ? std::conj(val)
                                    : val;
                    }
                    inner += prod;
                }
                acc += inner;
                int i = 1;
                while (i < k) {
                    if (++h[static_cast<std::size_t>(i)] < M) break;
                    h[static_cast<std::size_t>(i)] = 0;
                    ++i;
                }
                if (i == k) break;
            }
        }
        return acc;
    });
}

unsigned __int128 binom_exact(std::int64_t n, int r) {
    if (r < 0 || r > n) return 0;
    unsigned __int128 c = 1;
    for (int i = 1; i <= r; ++i) {
        c *= static_cast<unsigned __int128>(n - i + 1);
        c /= static_cast<unsigned __int128>(i);
    }
    return c;
}

unsigned __int128 box_count_128(std::int64_t N, int k) {
    if (N < 1) throw std::invalid_argument("box_count_interval: N must be >= 1");
    if (k < 1 || k > 40) throw std::invalid_argument("box_count_interval: k must be in [1, 40]");
    if ((k + 1) * std::log2(2.0 * static_cast<double>(N)) > 124.0)
        throw std::overflow_error("box_count_interval: count exceeds the 128-bit range");
    if (k == 2) {
        unsigned __int128 n = static_cast<unsigned __int128>(N);
        return (n - 1) * n * (2 * n - 1) / 3 + n * n;
    }
    unsigned __int128 total = 0;
    for (std::int64_t m = 0; m < N; ++m) {
        unsigned __int128 r = 0;
        if (m == 0) {
            r = 1;
        } else {
            int jmax = static_cast<int>(std::min<std::int64_t>(k, m));
            for (int j = 1; j <= jmax; ++j) {
                unsigned __int128 term = static_cast<unsigned __int128>(1) << j;
                term *= binom_exact(k, j);
                term *= binom_exact(m - 1, j - 1);
                r += term;
            }
        }
        total += static_cast<unsigned __int128>(N - m) * r;
    }
    return total;
}

double root_2k(double raised, int k) {
    return raised <= 0.0 ? 0.0 : std::pow(raised, 1.0 / static_cast<double>(1 << k));
}

cd value_sum(const ArithSignal& f) {
    cd s = 0.0;
    for (std::int64_t j = 0; j < f.length(); ++j) s += f.values[j];
    return s;
}

} // namespace

NormResult norm_group_naive(const ArithSignal& f, int k, std::uint64_t budget) {
    require_cyclic(f, "norm_group_naive");
    require_degree(k, "norm_group_naive");
    std::int64_t M = f.size_param;
    std::vector<const Eigen::ArrayXcd*> fam(static_cast<std::size_t>(1) << k, &f.values);
    cd sigma = sigma_box_group(fam, M, k, budget, "norm_group_naive");
    double raised = clamp_raised(sigma.real() / std::pow(static_cast<double>(M), k + 1),
                                 "norm_group_naive");
    NormResult r;
    r.k = k;
    r.raised = raised;
    r.value = root_2k(raised, k);
    r.normalization = std::pow(static_cast<double>(M),
                               static_cast<double>(k + 1) / static_cast<double>(1 << k));
    return r;
}

NormResult norm_group_fast(const ArithSignal& f, int k) {
    require_cyclic(f, "norm_group_fast");
    if (k < 2)
        throw std::invalid_argument(
            "norm_group_fast: k < 2 has no Fourier base; use the U^1 formula |E f| directly");
    require_degree(k, "norm_group_fast");
    std::int64_t M = f.size_param;
    double sigma = sigma_norm(f.values, k, false, 0);
    double raised = clamp_raised(sigma / std::pow(static_cast<double>(M), k + 1),
                                 "norm_group_fast");
    NormResult r;
    r.k = k;
    r.raised = raised;
    r.value = root_2k(raised, k);
    r.normalization = std::pow(static_cast<double>(M),
                               static_cast<double>(k + 1) / static_cast<double>(1 << k));
    return r;
}

NormResult norm_group_u2_direct(const ArithSignal& f) {
    require_cyclic(f, "norm_group_u2_direct");
    std::int64_t M = f.size_param;
    double sigma = blocked_reduce<double>(static_cast<std::size_t>(M), 16,
                                          [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            std::int64_t hm = static_cast<std::int64_t>(i);
            cd a = 0.0;
            for (std::int64_t x = 0; x + hm < M; ++x) a += f.values[x] * std::conj(f.values[x + hm]);
            for (std::int64_t x = M - hm; x < M; ++x)
                a += f.values[x] * std::conj(f.values[x + hm - M]);
            acc += std::norm(a);
        }
        return acc;
    });
    double raised = clamp_raised(sigma / std::pow(static_cast<double>(M), 3),
                                 "norm_group_u2_direct");
    NormResult r;
    r.k = 2;
    r.raised = raised;
    r.value = root_2k(raised, 2);
    r.normalization = std::pow(static_cast<double>(M), 3.0 / 4.0);
    return r;
}

double unnormalized_norm_z(const ArithSignal& f, int k) {
    require_interval(f, "unnormalized_norm_z");
    require_degree(k, "unnormalized_norm_z");
    double sigma = sigma_norm_z(f, k);
    return std::pow(clamp_raised(sigma, "unnormalized_norm_z"),
                    1.0 / static_cast<double>(1 << k));
}

double unnormalized_group_norm(const ArithSignal& f, int k) {
    require_cyclic(f, "unnormalized_group_norm");
    require_degree(k, "unnormalized_group_norm");
    if (k == 1) return std::abs(value_sum(f));
    double sigma = clamp_raised(sigma_norm(f.values, k, false, 0), "unnormalized_group_norm");
    return std::pow(sigma, 1.0 / static_cast<double>(1 << k));
}

std::uint64_t box_count_interval(std::int64_t N, int k) {
    unsigned __int128 c = box_count_128(N, k);
    if (c > static_cast<unsigned __int128>(UINT64_MAX))
        throw std::overflow_error("box_count_interval: count exceeds the 64-bit range");
    return static_cast<std::uint64_t>(c);
}

NormResult norm_interval(const ArithSignal& f, int k) {
    require_interval(f, "norm_interval");
    require_degree(k, "norm_interval");
    if (f.size_param < 1) throw std::invalid_argument("norm_interval: N must be >= 1");
    long double count = static_cast<long double>(box_count_128(f.size_param, k));
    double sigma = clamp_raised(sigma_norm_z(f, k), "norm_interval");
    NormResult r;
    r.k = k;
    r.raised = static_cast<double>(sigma / count);
    r.value = root_2k(r.raised, k);
    r.normalization = static_cast<double>(
        std::pow(count, 1.0L / static_cast<long double>(1 << k)));
    return r;
}

double coset_norm(const ArithSignal& f, std::int64_t a, std::int64_t d, int k) {
    require_interval(f, "coset_norm");
    require_degree(k, "coset_norm");
    if (d < 1) throw std::invalid_argument("coset_norm: step d must be >= 1");
    std::int64_t N = f.size_param;
    std::int64_t first = a >= 1 ? a : a + ((1 - a + d - 1) / d) * d;
    std::vector<cd> picked;
    for (std::int64_t p = first; p >= 1 && p <= N; p += d) picked.push_back(f.values[p - 1]);
    if (picked.empty()) return 0.0;
    Eigen::ArrayXcd v(static_cast<Eigen::Index>(picked.size()));
    for (std::size_t j = 0; j < picked.size(); ++j) v[static_cast<Eigen::Index>(j)] = picked[j];
    ArithSignal g = make_interval_signal(static_cast<std::int64_t>(picked.size()), std::move(v));
    return unnormalized_norm_z(g, k);
}

std::complex<double> gowers_inner(const std::vector<ArithSignal>& family, std::uint64_t budget) {
    if (family.empty() || (family.size() & (family.size() - 1)) != 0 || family.size() < 2)
        throw std::invalid_argument("gowers_inner: family size must be 2^k with k >= 1");
    int k = std::countr_zero(family.size());
    std::int64_t M = family.front().size_param;
    std::vector<const Eigen::ArrayXcd*> fam;
    fam.reserve(family.size());
    for (const auto& f : family) {
        if (f.domain != Domain::cyclic || f.size_param != M)
            throw std::invalid_argument("gowers_inner: family members must share one Z/MZ domain");
        fam.push_back(&f.values);
    }
    cd sigma = sigma_box_group(fam, M, k, budget, "gowers_inner");
    return sigma / std::pow(static_cast<double>(M), k + 1);
}

std::complex<double> gowers_inner_z(const std::vector<ArithSignal>& family, std::uint64_t budget) {
    if (family.empty() || (family.size() & (family.size() - 1)) != 0 || family.size() < 2)
        throw std::invalid_argument("gowers_inner_z: family size must be 2^k with k >= 1");
    int k = std::countr_zero(family.size());
    std::int64_t N = family.front().size_param;
    for (const auto& f : family)
        if (f.domain != Domain::interval || f.size_param != N)
            throw std::invalid_argument("gowers_inner_z: family members must share one interval [N]");
    long double tuples = std::pow(2.0L * static_cast<long double>(N), k) *
                         static_cast<long double>(N);
    if (tuples > static_cast<long double>(budget))
        throw resource_error("gowers_inner_z: enumeration exceeds the budget");
    int corners = 1 << k;
    auto at = [&](const ArithSignal& f, std::int64_t p) -> cd {
        return (p >= 1 && p <= N) ? f.values[p - 1] : cd(0.0);
    };
    std::size_t hcount = static_cast<std::size_t>(2 * N - 1);
    return blocked_reduce<cd>(hcount, 1, [&](std::size_t lo, std::size_t hi) {
        cd acc = 0.0;
        std::vector<std::int64_t> h(static_cast<std::size_t>(k), 0);
        std::vector<std::int64_t> shift(static_cast<std::size_t>(corners));
        for (std::int64_t i0 = static_cast<std::int64_t>(lo); i0 < static_cast<std::int64_t>(hi);
             ++i0) {
            h[0] = i0 - (N - 1);
            std::fill(h.begin() + 1, h.end(), -(N - 1));
            for (;;) {
                for (int w = 0; w < corners; ++w) {
                    std::int64_t s = 0;
                    for (int i = 0; i < k; ++i)
                        if ((w >> i) & 1) s += h[static_cast<std::size_t>(i)];
                    shift[static_cast<std::size_t>(w)] = s;
                }
                cd inner = 0.0;
                for (std::int64_t x = 1; x <= N; ++x) {
                    cd prod = 1.0;
                    for (int w = 0; w < corners && prod != cd(0.0); ++w) {
                        cd val = at(family[static_cast<std::size_t>(w)],
                                    x + shift[static_cast<std::size_t>(w)]);
                        prod *= (std::popcount(static_cast<unsigned>(w)) & 1)
                                    ? std::conj(val)
                                    : val;
                    }
                    inner += prod;
                }
                acc += inner;
                int i = 1;
                while (i < k) {
                    if (++h[static_cast<std::size_t>(i)] < N) break;
                    h[static_cast<std::size_t>(i)] = -(N - 1);
                    ++i;
                }
                if (i == k) break;
            }
        }
        return acc;
    });
}

ArithSignal dual_function(const ArithSignal& f, int k, std::uint64_t budget) {
    require_cyclic(f, "dual_function");
    require_degree(k, "dual_function");
    std::int64_t M = f.size_param;
    Eigen::ArrayXcd out(M);
    if (k == 2) {
        Eigen::ArrayXcd F = dft_forward(f.values);
        Eigen::ArrayXcd g(M);
        for (std::int64_t xi = 0; xi < M; ++xi) g[xi] = std::norm(F[xi]) * std::conj(F[xi]);
        out = dft_forward(g) / std::pow(static_cast<double>(M), 3);
    } else {
        long double tuples = std::pow(static_cast<long double>(M), k + 1);
        if (tuples > static_cast<long double>(budget))
            throw resource_error("dual_function: enumeration over M^(k+1) tuples exceeds the budget");
        int corners = 1 << k;
        double scale = std::pow(static_cast<double>(M), k);
        blocked_apply(static_cast<std::size_t>(M), 4, [&](std::size_t lo, std::size_t hi) {
            std::vector<std::int64_t> h(static_cast<std::size_t>(k), 0);
            for (std::size_t xs = lo; xs < hi; ++xs) {
                std::int64_t x = static_cast<std::int64_t>(xs);
                cd acc = 0.0;
                std::fill(h.begin(), h.end(), 0);
                for (;;) {
                    cd prod = 1.0;
                    for (int w = 1; w < corners; ++w) {
                        std::int64_t s = 0;
                        for (int i = 0; i < k; ++i)
                            if ((w >> i) & 1) s += h[static_cast<std::size_t>(i)];
                        cd val = f.values[(x + s) % M];
                        prod *= (std::popcount(static_cast<unsigned>(w)) & 1)
                                    ? std::conj(val)
                                    : val;
                    }
                    acc += prod;
                    int i = 0;
                    while (i < k) {
                        if (++h[static_cast<std::size_t>(i)] < M) break;
                        h[static_cast<std::size_t>(i)] = 0;
                        ++i;
                    }
                    if (i == k) break;
                }
                out[x] = acc / scale;
            }
        });
    }
    if (f.real_valued)
        for (std::int64_t x = 0; x < M; ++x) out[x] = cd(out[x].real(), 0.0);
    ArithSignal g = make_cyclic_signal(M, std::move(out),
                                       "dual" + std::to_string(k) + "(" + f.label + ")");
    g.real_valued = f.real_valued;
    return g;
}

double coprime_indicator_norm(std::int64_t W, int k, std::uint64_t budget) {
    require_degree(k, "coprime_indicator_norm");
    if (W < 1) throw std::invalid_argument("coprime_indicator_norm: W must be >= 1");
    if (W == 1) return 1.0;
    std::vector<std::int64_t> primes;
    std::int64_t m = W;
    for (std::int64_t p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        m /= p;
        if (m % p == 0)
            throw std::invalid_argument("coprime_indicator_norm: W must be squarefree");
        primes.push_back(p);
    }
    if (m > 1) primes.push_back(m);
    double product = 1.0;
    for (std::int64_t p : primes) {
        Eigen::ArrayXcd v = Eigen::ArrayXcd::Zero(p);
        double weight = static_cast<double>(p) / static_cast<double>(p - 1);
        for (std::int64_t n = 1; n < p; ++n) v[n] = weight;
        ArithSignal g = make_cyclic_signal(p, std::move(v));
        product *= norm_group_naive(g, k, budget).value;
    }
    return product;
}

std::pair<double, double> coset_sum_bound(const ArithSignal& f, std::int64_t q, int k) {
    require_interval(f, "coset_sum_bound");
    require_degree(k, "coset_sum_bound");
    if (q < 1) throw std::invalid_argument("coset_sum_bound: q must be >= 1");
    for (std::int64_t j = 0; j < f.length(); ++j)
        if (std::abs(f.values[j]) > 1.0 + 1e-9)
            throw std::invalid_argument("coset_sum_bound: f must be bounded by 1 in absolute value");
    std::int64_t N = f.size_param;
    double lhs = norm_interval(f, k).raised;
    double rhs = 0.0;
    for (std::int64_t d = 1; d <= q; ++d) {
        if (q % d) continue;
        std::int64_t L = N / d;
        if (L < 1) continue;
        std::int64_t co = q / d;
        Eigen::ArrayXcd v(L);
        for (std::int64_t n = 1; n <= L; ++n)
            v[n - 1] = std::gcd(n, co) == 1 ? f.values[d * n - 1] : cd(0.0);
        ArithSignal g = make_interval_signal(L, std::move(v));
        rhs += norm_interval(g, k).value / static_cast<double>(d);
    }
    return {lhs, rhs};
}

} // namespace gowerslab
