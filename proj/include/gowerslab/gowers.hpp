#pragma once

#include "gowerslab/signal.hpp"

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace gowerslab {

// Result of a normalized norm evaluation. raised is value^{2^k};
// normalization is the divisor used (the norm of the constant-one signal on
// the same domain, in the same unnormalized convention).
struct NormResult {
    double value = 0.0;
    double raised = 0.0;
    int k = 0;
    double normalization = 1.0;
};

// Exact enumeration of the degree-k correlation average over Z/MZ, with the
// standard conjugation pattern (factors at odd-weight corners conjugated).
// Work is M^{k+1} box tuples; past the budget a resource error is thrown.
NormResult norm_group_naive(const ArithSignal& f, int k,
                            std::uint64_t budget = 300000000ull);

// Derivative recursion over shifts with the degree-2 Fourier base case.
// Requires k >= 2; for k = 1 use the mean directly.
NormResult norm_group_fast(const ArithSignal& f, int k);

// Quadratic-time degree-2 evaluation through the autocorrelation
// sum_h |sum_x f(x) conj f(x+h)|^2. Independent of the Fourier base, serves
// as an oracle for it at sizes where full enumeration is out of reach.
NormResult norm_group_u2_direct(const ArithSignal& f);

// Unnormalized degree-k norm over Z of a signal supported in [N], evaluated
// exactly by embedding into a cyclic group of order >= 4kN (no wraparound).
double unnormalized_norm_z(const ArithSignal& f, int k);

// Unnormalized (Sigma-form) degree-k norm over Z/MZ.
double unnormalized_group_norm(const ArithSignal& f, int k);

// Exact number of tuples (n, h_1..h_k) in Z^{k+1} with every corner
// n + omega.h inside [N]. Throws overflow_error past the 64-bit range.
std::uint64_t box_count_interval(std::int64_t N, int k);

// Normalized interval norm: unnormalized Z-norm divided by the [N] box count
// to the power 1/2^k.
NormResult norm_interval(const ArithSignal& f, int k);

// Unnormalized norm of n -> f(a + dn) along the subprogression of [N].
double coset_norm(const ArithSignal& f, std::int64_t a, std::int64_t d, int k);

// Box inner product of a family of 2^k signals on a common Z/MZ, normalized
// as an average; the all-equal family recovers the raised norm.
std::complex<double> gowers_inner(const std::vector<ArithSignal>& family,
                                  std::uint64_t budget = 300000000ull);

// Sigma-form box inner product over Z for interval signals on a common [N].
std::complex<double> gowers_inner_z(const std::vector<ArithSignal>& family,
                                    std::uint64_t budget = 300000000ull);

// Dual function Df(x) = E_{h} prod_{omega != 0} C^{|omega|} f(x + omega.h),
// so that E[f.Df] equals the raised degree-k norm. Fourier shortcut at k = 2,
// enumeration otherwise (budget-guarded).
ArithSignal dual_function(const ArithSignal& f, int k,
                          std::uint64_t budget = 300000000ull);

// Normalized degree-k norm of (W/phi(W)) 1_{(n,W)=1} over Z/WZ, computed as
// a product of per-prime norms; W must be squarefree.
double coprime_indicator_norm(std::int64_t W, int k,
                              std::uint64_t budget = 300000000ull);

// Two-sided report for the divisor-sliced triangle bound on [N]:
// lhs = ||f||^{2^k}_{U^k([N])},
// rhs = sum_{d|q} (1/d) ||f(d.)1_{(.,q/d)=1}||_{U^k([N/d])}.
// Requires |f| <= 1 pointwise.
std::pair<double, double> coset_sum_bound(const ArithSignal& f, std::int64_t q,
                                          int k);

} // namespace gowerslab
