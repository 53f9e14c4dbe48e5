#include "gowerslab/models.hpp"

#include "gowerslab/arith.hpp"
#include "gowerslab/errors.hpp"
#include "gowerslab/gowers.hpp"
#include "gowerslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gowerslab {

namespace {

// B_{2j} for j = 1..8 and the matching (2j)! values.
constexpr double kBernoulli[8] = {1.0 / 6.0,      -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                  5.0 / 66.0,     -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};
constexpr double kFact2j[8] = {2.0,          24.0,           720.0,           40320.0,
                               3628800.0,    479001600.0,    87178291200.0,   20922789888000.0};
constexpr int kEmLead = 18; // directly summed leading terms
constexpr int kEmCorr = 8;  // Bernoulli correction terms

// (x^{1-s} - 1)/(s - 1), the pole-subtracted tail integral. Continuous
// through s = 1 where it equals -log x.
double pole_subtracted_tail(double s, double x) {
    double lx = std::log(x);
    if (std::abs(s - 1.0) < 1e-9) return -lx * (1.0 + 0.5 * (1.0 - s) * lx);
    return std::expm1((1.0 - s) * lx) / (s - 1.0);
}

// Euler-Maclaurin Hurwitz zeta on 0 < a <= 1, s > 0. With pole_free the
// constant -1/(s-1) is dropped, which makes the value regular at s = 1;
// character sums are unchanged because sum_a chi(a) = 0.
double em_hurwitz(double s, double a, bool pole_free) {
    double sum = 0.0;
    for (int n = 0; n < kEmLead; ++n) sum += std::pow(n + a, -s);
    const double x = kEmLead + a;
    sum += pole_free ? pole_subtracted_tail(s, x) : std::pow(x, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(x, -s);
    double poch = s; // rising factorial (s)_{2j-1}
    double xp = std::pow(x, -s - 1.0);
    for (int j = 1; j <= kEmCorr; ++j) {
        sum += kBernoulli[j - 1] / kFact2j[j - 1] * poch * xp;
        poch *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        xp /= x * x;
    }
    return sum;
}

// d/ds of em_hurwitz(s, a, pole_free=true), term by term.
double em_hurwitz_ds(double s, double a) {
    double sum = 0.0;
    for (int n = 0; n < kEmLead; ++n) {
        double t = n + a;
        sum -= std::log(t) * std::pow(t, -s);
    }
    const double x = kEmLead + a;
    const double lx = std::log(x);
    if (std::abs(s - 1.0) < 1e-4) {
        double u = s - 1.0;
        sum += lx * lx * (0.5 - u * lx / 3.0 + u * u * lx * lx / 8.0);
    } else {
        double g = std::expm1((1.0 - s) * lx) / (s - 1.0);
        sum += (-lx * std::pow(x, 1.0 - s) - g) / (s - 1.0);
    }
    sum -= 0.5 * lx * std::pow(x, -s);
    double poch = s;
    double xp = std::pow(x, -s - 1.0);
    double recip = 1.0 / s; // sum_{i=0}^{2j-2} 1/(s+i)
    for (int j = 1; j <= kEmCorr; ++j) {
        sum += kBernoulli[j - 1] / kFact2j[j - 1] * poch * xp * (recip - lx);
        poch *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        recip += 1.0 / (s + 2.0 * j - 1.0) + 1.0 / (s + 2.0 * j);
        xp /= x * x;
    }
    return sum;
}

void require_l_domain(const DirichletCharacter& chi, double s) {
    if (chi.trivial) throw std::invalid_argument("l_function: character must be nonprincipal");
    if (!(s > 0.0)) throw std::domain_error("l_function: s must be positive");
}

double totient_ratio(std::int64_t W) { // phi(W)/W
    double r = 1.0;
    std::int64_t x = W;
    for (std::int64_t p = 2; p * p <= x; ++p) {
        if (x % p) continue;
        r *= 1.0 - 1.0 / static_cast<double>(p);
        while (x % p == 0) x /= p;
    }
    if (x > 1) r *= 1.0 - 1.0 / static_cast<double>(x);
    return r;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
    std::int64_t r0 = m, r1 = a % m, t0 = 0, t1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    return t0 < 0 ? t0 + m : t0;
}

void warn_if_trivial_cutoff(double Q) {
    auto ps = primes_below(Q); // P(Q) is 1 or 2 iff no prime or only 2 lies below Q
    if (ps.size() <= 1)
        std::cerr << "warning: sieve cutoff Q=" << Q << " gives a near-trivial coprimality condition (P(Q)="
                  << (ps.empty() ? 1 : 2) << ")\n";
}

double adaptive_simpson(double (*f)(double), double a, double b, double fa, double fm, double fb,
                        double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double flm = f(0.5 * (a + m));
    double frm = f(0.5 * (m + b));
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double cutoff_prime_sq(double x) {
    double v = cutoff_chi_prime(x);
    return v * v;
}

} // namespace

double hurwitz_zeta(double s, double a) {
    if (!(s > 0.0)) throw std::domain_error("hurwitz_zeta: s must be positive");
    if (s == 1.0) throw std::domain_error("hurwitz_zeta: pole at s = 1");
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("hurwitz_zeta: a must lie in (0, 1]");
    return em_hurwitz(s, a, false);
}

double l_function(const DirichletCharacter& chi, double s) {
    require_l_domain(chi, s);
    auto tab = chi.period_table();
    double sum = 0.0;
    for (std::int64_t a = 1; a < chi.q; ++a) {
        if (tab[static_cast<std::size_t>(a)] == 0) continue;
        sum += tab[static_cast<std::size_t>(a)] *
               em_hurwitz(s, static_cast<double>(a) / static_cast<double>(chi.q), true);
    }
    return sum * std::pow(static_cast<double>(chi.q), -s);
}

double l_function_derivative(const DirichletCharacter& chi, double s) {
    const double h = 1e-4;
    require_l_domain(chi, s);
    if (!(s > 2.0 * h)) throw std::domain_error("l_function_derivative: s too close to 0 for the stencil");
    return (-l_function(chi, s + 2.0 * h) + 8.0 * l_function(chi, s + h) - 8.0 * l_function(chi, s - h) +
            l_function(chi, s - 2.0 * h)) /
           (12.0 * h);
}

double l_function_derivative_series(const DirichletCharacter& chi, double s) {
    require_l_domain(chi, s);
    auto tab = chi.period_table();
    double sum = 0.0;
    for (std::int64_t a = 1; a < chi.q; ++a) {
        if (tab[static_cast<std::size_t>(a)] == 0) continue;
        sum += tab[static_cast<std::size_t>(a)] *
               em_hurwitz_ds(s, static_cast<double>(a) / static_cast<double>(chi.q));
    }
    double q = static_cast<double>(chi.q);
    return std::pow(q, -s) * sum - std::log(q) * l_function(chi, s);
}

SiegelConfig make_siegel_config(std::int64_t q, double beta, double Q) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("make_siegel_config: beta must lie in (0, 1)");
    if (!(static_cast<double>(q) < Q))
        throw std::invalid_argument("make_siegel_config: conductor must be below the sieve cutoff Q");
    SiegelConfig cfg;
    cfg.exists = true;
    cfg.q = q;
    cfg.beta = beta;
    cfg.chi = make_real_character(q);
    if (cfg.chi.trivial)
        throw std::invalid_argument("make_siegel_config: q = 1 gives the principal character");
    cfg.Q = Q;
    cfg.l_prime_at_beta = l_function_derivative(cfg.chi, beta);
    if (std::abs(cfg.l_prime_at_beta) < 1e-12)
        throw degenerate_config_error(
            "make_siegel_config: L'(beta, chi) vanishes to working precision, cannot normalize");
    // alpha = 1/L'(beta, chi) * prod_{p<Q} (1 - 1/p)^{-1} (1 - chi(p) p^{-beta})^{-1};
    // the second factor is 1 at p | q where chi(p) = 0.
    double alpha = 1.0 / cfg.l_prime_at_beta;
    for (std::int64_t p : primes_below(Q)) {
        alpha /= 1.0 - 1.0 / static_cast<double>(p);
        int cp = cfg.chi(p);
        if (cp != 0) alpha /= 1.0 - cp * std::pow(static_cast<double>(p), -beta);
    }
    if (!std::isfinite(alpha))
        throw degenerate_config_error("make_siegel_config: alpha product is not finite");
    cfg.alpha = alpha;
    warn_if_trivial_cutoff(Q);
    return cfg;
}

SiegelConfig no_siegel_config(double Q) {
    if (!(Q >= 2.0)) throw std::invalid_argument("no_siegel_config: Q must be at least 2");
    SiegelConfig cfg;
    cfg.exists = false;
    cfg.Q = Q;
    warn_if_trivial_cutoff(Q);
    return cfg;
}

std::string siegel_config_kv(const SiegelConfig& cfg) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "q=%lld\nbeta=%.17g\nQ=%.17g\nalpha=%.17g\nl_prime=%.17g\n",
                  static_cast<long long>(cfg.q), cfg.beta, cfg.Q, cfg.alpha, cfg.l_prime_at_beta);
    return buf;
}

ArithSignal cramer(double w, std::int64_t N) {
    if (!(w >= 2.0)) throw std::invalid_argument("cramer: w must be at least 2");
    if (N < 1) throw std::invalid_argument("cramer: N must be >= 1");
    auto ps = primes_below(w);
    double weight = 1.0;
    for (std::int64_t p : ps) weight *= static_cast<double>(p) / static_cast<double>(p - 1);
    std::vector<char> coprime(static_cast<std::size_t>(N) + 1, 1);
    for (std::int64_t p : ps)
        for (std::int64_t m = p; m <= N; m += p) coprime[static_cast<std::size_t>(m)] = 0;
    Eigen::ArrayXcd v(N);
    blocked_apply(static_cast<std::size_t>(N), 65536, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) v[static_cast<std::int64_t>(j)] = coprime[j + 1] ? weight : 0.0;
    });
    char label[64];
    std::snprintf(label, sizeof label, "cramer(w=%g)", w);
    auto f = make_interval_signal(N, std::move(v), label);
    f.real_valued = true;
    return f;
}

ArithSignal lambda_siegel(const SiegelConfig& cfg, std::int64_t N) {
    ArithSignal f = cramer(cfg.Q, N);
    if (!cfg.exists) {
        f.label = "lambda_siegel(none)";
        return f;
    }
    auto tab = cfg.chi.period_table();
    const double bm1 = cfg.beta - 1.0;
    blocked_apply(static_cast<std::size_t>(N), 65536, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            if (f.values[static_cast<std::int64_t>(j)] == 0.0) continue;
            std::int64_t n = static_cast<std::int64_t>(j) + 1;
            int cn = tab[static_cast<std::size_t>(n % cfg.q)];
            if (cn == 0) continue;
            f.values[static_cast<std::int64_t>(j)] *= 1.0 - std::pow(static_cast<double>(n), bm1) * cn;
        }
    });
    char label[96];
    std::snprintf(label, sizeof label, "lambda_siegel(q=%lld,beta=%g,Q=%g)",
                  static_cast<long long>(cfg.q), cfg.beta, cfg.Q);
    f.label = label;
    return f;
}

ArithSignal mu_siegel(const SiegelConfig& cfg, std::int64_t N) {
    if (N < 1) throw std::invalid_argument("mu_siegel: N must be >= 1");
    Eigen::ArrayXcd v = Eigen::ArrayXcd::Zero(N);
    if (cfg.exists) {
        FactorTable t = FactorTable::build(static_cast<std::uint64_t>(N));
        auto tab = cfg.chi.period_table();
        const double bm1 = cfg.beta - 1.0;
        blocked_apply(static_cast<std::size_t>(N), 65536, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t j = lo; j < hi; ++j) {
                std::int64_t n = static_cast<std::int64_t>(j) + 1;
                // peel the Q-smooth part; a repeated smooth prime kills the term
                std::int64_t m = n;
                int mu_d = 1;
                while (m > 1) {
                    std::int64_t p = t.spf[static_cast<std::size_t>(m)];
                    if (!(static_cast<double>(p) < cfg.Q)) break;
                    m /= p;
                    if (m % p == 0) {
                        mu_d = 0;
                        break;
                    }
                    mu_d = -mu_d;
                }
                if (mu_d == 0) continue;
                int cm = tab[static_cast<std::size_t>(m % cfg.q)];
                if (cm == 0) continue;
                v[static_cast<std::int64_t>(j)] =
                    mu_d * cfg.alpha * std::pow(static_cast<double>(m), bm1) * cm;
            }
        });
    }
    char label[96];
    std::snprintf(label, sizeof label, "mu_siegel(q=%lld,beta=%g,Q=%g)", static_cast<long long>(cfg.q),
                  cfg.beta, cfg.Q);
    auto f = make_interval_signal(N, std::move(v), label);
    f.real_valued = true;
    return f;
}

std::pair<double, double> euler_product_check(const SiegelConfig& cfg, std::int64_t q_induced, double s,
                                              std::int64_t X) {
    if (!(s > 1.0)) throw std::invalid_argument("euler_product_check: s must exceed 1");
    if (X < 1) throw std::invalid_argument("euler_product_check: X must be >= 1");
    if (q_induced < 1 || q_induced % cfg.q != 0)
        throw std::invalid_argument("euler_product_check: q_induced must be a multiple of the conductor");
    // q_induced must divide lcm(q, P(Q)): each prime power p^e of q_induced
    // needs e <= max(e_p(q), [p < Q]).
    std::int64_t rem = q_induced;
    for (std::int64_t p = 2; p * p <= rem; ++p) {
        if (rem % p) continue;
        int e = 0;
        while (rem % p == 0) {
            rem /= p;
            ++e;
        }
        int eq = 0;
        std::int64_t qq = cfg.q;
        while (qq % p == 0) {
            qq /= p;
            ++eq;
        }
        int cap = std::max(eq, static_cast<double>(p) < cfg.Q ? 1 : 0);
        if (e > cap)
            throw std::invalid_argument("euler_product_check: q_induced does not divide lcm(q, P(Q))");
    }
    if (rem > 1 && cfg.q % rem != 0 && !(static_cast<double>(rem) < cfg.Q))
        throw std::invalid_argument("euler_product_check: q_induced does not divide lcm(q, P(Q))");
    if (!cfg.exists) return {0.0, 0.0};

    ArithSignal mus = mu_siegel(cfg, X);
    auto tab = cfg.chi.period_table();
    std::vector<std::int8_t> chi_ind(static_cast<std::size_t>(q_induced));
    for (std::int64_t r = 0; r < q_induced; ++r)
        chi_ind[static_cast<std::size_t>(r)] =
            std::gcd(r, q_induced) == 1 ? tab[static_cast<std::size_t>(r % cfg.q)] : 0;
    double series = blocked_reduce<double>(
        static_cast<std::size_t>(X), 65536, [&](std::size_t lo, std::size_t hi) {
            double part = 0.0;
            for (std::size_t j = lo; j < hi; ++j) {
                std::int64_t n = static_cast<std::int64_t>(j) + 1;
                int c = chi_ind[static_cast<std::size_t>(n % q_induced)];
                if (c == 0) continue;
                part += mus.values[static_cast<std::int64_t>(j)].real() * c *
                        std::pow(static_cast<double>(n), -s);
            }
            return part;
        });

    double closed = cfg.alpha * em_hurwitz(s + 1.0 - cfg.beta, 1.0, false);
    for (std::int64_t p : primes_below(cfg.Q)) {
        double pd = static_cast<double>(p);
        closed *= 1.0 - std::pow(pd, -(s + 1.0 - cfg.beta));
        if (q_induced % p != 0) {
            int cp = tab[static_cast<std::size_t>(p % cfg.q)];
            if (cp != 0) closed *= 1.0 - cp * std::pow(pd, -s);
        }
    }
    return {series, closed};
}

ArithSignal lambda_sharp(std::int64_t N, double c1) {
    if (!(c1 > 0.0 && c1 < 1.0)) throw std::invalid_argument("lambda_sharp: c1 must lie in (0, 1)");
    if (N < 1) throw std::invalid_argument("lambda_sharp: N must be >= 1");
    auto cutoff = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(N), c1)));
    std::vector<double> acc(static_cast<std::size_t>(N) + 1, 0.0);
    if (cutoff >= 2) {
        FactorTable t = FactorTable::build(static_cast<std::uint64_t>(cutoff));
        for (std::int64_t d = 2; d <= cutoff; ++d) {
            int mu_d = moebius(t, static_cast<std::uint64_t>(d));
            if (mu_d == 0) continue;
            double term = mu_d * std::log(static_cast<double>(d));
            for (std::int64_t n = d; n <= N; n += d) acc[static_cast<std::size_t>(n)] -= term;
        }
    }
    Eigen::ArrayXcd v(N);
    blocked_apply(static_cast<std::size_t>(N), 65536, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) v[static_cast<std::int64_t>(j)] = acc[j + 1];
    });
    char label[64];
    std::snprintf(label, sizeof label, "lambda_sharp(c1=%g)", c1);
    auto f = make_interval_signal(N, std::move(v), label);
    f.real_valued = true;
    return f;
}

double cutoff_chi(double x) {
    double ax = std::abs(x);
    if (ax <= 1.0) return 0.5;
    if (ax >= 2.0) return 0.0;
    double c = std::cos(0.5 * std::numbers::pi * (ax - 1.0));
    return 0.5 * c * c;
}

double cutoff_chi_prime(double x) {
    double ax = std::abs(x);
    if (ax <= 1.0 || ax >= 2.0) return 0.0;
    double v = -0.25 * std::numbers::pi * std::sin(std::numbers::pi * (ax - 1.0));
    return x < 0.0 ? -v : v;
}

GYWeightParams make_gy_params(std::int64_t W, std::int64_t b, double R) {
    if (W < 1 || b < 1 || b > W) throw std::invalid_argument("make_gy_params: need 1 <= b <= W");
    if (std::gcd(W, b) != 1) throw std::invalid_argument("make_gy_params: b must be coprime to W");
    if (!(R > 1.0)) throw std::invalid_argument("make_gy_params: R must exceed 1");
    GYWeightParams params;
    params.W = W;
    params.b = b;
    params.R = R;
    double fa = cutoff_prime_sq(1.0);
    double fb = cutoff_prime_sq(2.0);
    double fm = cutoff_prime_sq(1.5);
    double whole = (2.0 - 1.0) / 6.0 * (fa + 4.0 * fm + fb);
    params.c_chi2 = adaptive_simpson(cutoff_prime_sq, 1.0, 2.0, fa, fm, fb, whole, 1e-12, 40);
    return params;
}

ArithSignal gy_majorant(const GYWeightParams& params, std::int64_t N) {
    if (!(params.c_chi2 > 0.0))
        throw std::invalid_argument("gy_majorant: params.c_chi2 not set; build with make_gy_params");
    if (!(params.R > 1.0)) throw std::invalid_argument("gy_majorant: R must exceed 1");
    if (N < 1) throw std::invalid_argument("gy_majorant: N must be >= 1");
    const double lnR = std::log(params.R);
    const auto dmax = static_cast<std::int64_t>(params.R * params.R);
    FactorTable t = FactorTable::build(static_cast<std::uint64_t>(std::max<std::int64_t>(dmax, 2)));
    std::vector<double> acc(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::int64_t d = 1; d <= dmax; ++d) {
        int mu_d = d == 1 ? 1 : moebius(t, static_cast<std::uint64_t>(d));
        if (mu_d == 0 || std::gcd(d, params.W) != 1) continue;
        double wt = mu_d * cutoff_chi(std::log(static_cast<double>(d)) / lnR);
        if (wt == 0.0) continue;
        std::int64_t start = 1;
        if (d > 1) {
            // n with d | W n + b: n = -b W^{-1} mod d
            std::int64_t winv = mod_inverse(params.W % d, d);
            std::int64_t n0 = ((d - params.b % d) % d) * winv % d;
            start = n0 == 0 ? d : n0;
        }
        for (std::int64_t n = start; n <= N; n += d) acc[static_cast<std::size_t>(n)] += wt;
    }
    const double scale = totient_ratio(params.W) / params.c_chi2 * lnR;
    Eigen::ArrayXcd v(N);
    blocked_apply(static_cast<std::size_t>(N), 65536, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) v[static_cast<std::int64_t>(j)] = scale * acc[j + 1] * acc[j + 1];
    });
    char label[96];
    std::snprintf(label, sizeof label, "gy_nu(W=%lld,b=%lld,R=%.6g)", static_cast<long long>(params.W),
                  static_cast<long long>(params.b), params.R);
    auto f = make_interval_signal(N, std::move(v), label);
    f.real_valued = true;
    return f;
}

ArithSignal gy_majorant_cyclic(const GYWeightParams& params, std::int64_t M) {
    ArithSignal base = gy_majorant(params, M);
    char label[96];
    std::snprintf(label, sizeof label, "gy_nu_cyclic(W=%lld,b=%lld,R=%.6g)",
                  static_cast<long long>(params.W), static_cast<long long>(params.b), params.R);
    auto f = make_cyclic_signal(M, std::move(base.values), label);
    f.real_valued = true;
    return f;
}

ArithSignal w_trick(const ArithSignal& f, std::int64_t W, std::int64_t b) {
    if (f.domain != Domain::interval) throw std::invalid_argument("w_trick: expects an interval signal");
    if (W < 1 || b < 1 || b > W) throw std::invalid_argument("w_trick: need 1 <= b <= W");
    if (std::gcd(W, b) != 1) throw std::invalid_argument("w_trick: b must be coprime to W");
    std::int64_t L = (f.size_param - b) / W;
    if (L < 0) L = 0;
    const double ratio = totient_ratio(W);
    Eigen::ArrayXcd v(L);
    for (std::int64_t n = 1; n <= L; ++n) v[n - 1] = ratio * f.values[W * n + b - 1];
    auto g = make_interval_signal(L, std::move(v),
                                  f.label.empty() ? std::string{} : f.label + "@(W" + std::to_string(W) +
                                                                        "+" + std::to_string(b) + ")");
    g.real_valued = f.real_valued;
    return g;
}

double dual_moment(const ArithSignal& nu, int k, int j, std::uint64_t budget) {
    if (j < 0 || j > 2) throw std::invalid_argument("dual_moment: j must be 0, 1, or 2");
    if (j == 0) return 1.0;
    ArithSignal d = dual_function(nu, k, budget);
    std::complex<double> acc = 0.0;
    for (std::int64_t x = 0; x < d.length(); ++x)
        acc += j == 1 ? d.values[x] : d.values[x] * d.values[x];
    return (acc / static_cast<double>(d.length())).real();
}

} // namespace gowerslab
