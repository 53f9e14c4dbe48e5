#pragma once

#include "gowerslab/characters.hpp"
#include "gowerslab/signal.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace gowerslab {

// Hurwitz zeta zeta(s, a) for s > 0, s != 1, 0 < a <= 1, by Euler-Maclaurin
// with Bernoulli terms through B16. Good to ~1e-13 relative on this range.
double hurwitz_zeta(double s, double a);

// L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q). The pole terms of the
// Hurwitz zetas cancel against sum chi(a) = 0, so s = 1 is a regular point
// and the implementation evaluates there directly. Requires s > 0 and chi
// nonprincipal.
double l_function(const DirichletCharacter& chi, double s);

// dL/ds by the 5-point central stencil with step 1e-4.
double l_function_derivative(const DirichletCharacter& chi, double s);

// Independent check route: differentiate the Euler-Maclaurin series term by
// term instead of stencilling. Used to validate l_function_derivative.
double l_function_derivative_series(const DirichletCharacter& chi, double s);

// Synthetic zero configuration: (q, beta) are hypotheses, alpha and
// L'(beta, chi) are computed from them. Immutable after construction.
struct SiegelConfig {
    bool exists = false;
    std::int64_t q = 1;
    double beta = 0.0;
    DirichletCharacter chi;
    double Q = 0.0;
    double alpha = 0.0;
    double l_prime_at_beta = 0.0;
};

// Validates (q admissible, 0 < beta < 1, q < Q), evaluates L'(beta, chi) and
// the alpha product over p < Q. |L'| < 1e-12 throws degenerate_config_error.
// Warns on stderr when the coprimality condition behind Q is trivial
// (primorial(Q) is 1 or 2).
SiegelConfig make_siegel_config(std::int64_t q, double beta, double Q);

// The no-zero configuration: lambda_siegel falls back to the Cramer model at
// cutoff Q and mu_siegel vanishes.
SiegelConfig no_siegel_config(double Q);

// Plain key=value block: q, beta, Q, alpha, l_prime.
std::string siegel_config_kv(const SiegelConfig& cfg);

// Cramer model on [N]: value prod_{p<w} p/(p-1) at n coprime to all primes
// below w, else 0. Coprimality is tested against the prime list, never a
// materialized primorial.
ArithSignal cramer(double w, std::int64_t N);

// lambda_siegel(n) = Lambda_Cramer_Q(n) * (1 - n^{beta-1} chi(n)); the plain
// Cramer model when the configuration has no zero.
ArithSignal lambda_siegel(const SiegelConfig& cfg, std::int64_t N);

// mu_siegel(n) via the smooth/rough split n = d*m (d = Q-smooth part):
// mu(d) * alpha * m^{beta-1} chi(m), zero when d is not squarefree and when
// the configuration has no zero.
ArithSignal mu_siegel(const SiegelConfig& cfg, std::int64_t N);

// Compares the truncated Dirichlet series sum_{n<=X} mu_siegel(n) chi_I(n) n^{-s}
// (chi_I = chi induced to modulus q_induced) against the closed-form Euler
// product with finite factors over p < Q. Requires s > 1 and
// q | q_induced | lcm(q, primorial(Q)).
std::pair<double, double> euler_product_check(const SiegelConfig& cfg, std::int64_t q_induced,
                                              double s, std::int64_t X);

// Truncated divisor sum lambda_sharp(n) = -sum_{d|n, d <= N^c1} mu(d) log d.
ArithSignal lambda_sharp(std::int64_t N, double c1);

// Smooth cutoff used by the majorant: 1/2 on [-1,1], (1/2)cos^2(pi(|x|-1)/2)
// on 1 <= |x| <= 2, zero beyond; and its derivative.
double cutoff_chi(double x);
double cutoff_chi_prime(double x);

struct GYWeightParams {
    std::int64_t W = 1;
    std::int64_t b = 1;
    double R = 2.0;
    double c_chi2 = 0.0; // integral of cutoff_chi_prime^2 over [1,2]
};

// Fills c_chi2 by adaptive quadrature (= pi^2/32 for this cutoff).
// Requires R > 1, 1 <= b <= W, gcd(b, W) = 1.
GYWeightParams make_gy_params(std::int64_t W, std::int64_t b, double R);

// nu(n) = (phi(W)/W) (1/c_chi2) log R (sum_{d | Wn+b} mu(d) cutoff(log d / log R))^2
// on [N]; the divisor sum is swept over squarefree d < R^2 coprime to W.
ArithSignal gy_majorant(const GYWeightParams& params, std::int64_t N);

// Same values at n = 1..M, rewrapped as a signal on Z/MZ for the dual-moment
// experiments (index j holds nu(j+1)).
ArithSignal gy_majorant_cyclic(const GYWeightParams& params, std::int64_t M);

// n -> (phi(W)/W) f(Wn + b) on [(N-b)/W]. Requires 1 <= b <= W coprime to W.
ArithSignal w_trick(const ArithSignal& f, std::int64_t W, std::int64_t b);

// E_x (D nu(x))^j for j in {0, 1, 2}, D the degree-k dual from the norm
// engine. Real part of the complex mean; exact 1 for j = 0.
double dual_moment(const ArithSignal& nu, int k, int j, std::uint64_t budget = 300000000ull);

} // namespace gowerslab
