#pragma once

#include "gowerslab/signal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gowerslab {

using VecZ = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// One affine-linear form n -> coeffs.n + constant on Z^d.
struct AffineForm {
    VecZ coeffs;
    std::int64_t constant = 0;
};

// A finite-complexity affine system: no two coefficient vectors are parallel
// (every pair has a nonvanishing 2x2 minor). L records the largest
// coefficient magnitude; constants are expected to stay within L*N for the
// scale N a caller works at.
struct AffineSystem {
    int d = 0;
    int t = 0;
    std::vector<AffineForm> forms;
    std::int64_t L = 0;

    std::int64_t eval(int i, const VecZ& n) const;
    void validate() const;
};

AffineSystem make_affine_system(int d, std::vector<AffineForm> forms);

// The k-term progression system (n1, n1+n2, ..., n1+(k-1)n2) on Z^2.
AffineSystem ap_system(int k);

// Closed half-space normal.x <= offset.
struct HalfSpace {
    Eigen::VectorXd normal;
    double offset = 0.0;
};

// Intersection of half-spaces with an axis-aligned bounding box derived from
// the single-coordinate half-spaces. Every coordinate must be bounded both
// ways or construction throws; an empty body (box_lo > box_hi somewhere) is
// legal and has volume zero.
struct ConvexBody {
    int d = 0;
    std::vector<HalfSpace> half_spaces;
    Eigen::VectorXd box_lo;
    Eigen::VectorXd box_hi;

    bool contains(const Eigen::VectorXd& x) const;
    bool empty() const;
    void validate() const;
};

ConvexBody make_convex_body(int d, std::vector<HalfSpace> half_spaces);

// Convenience box [lo_1,hi_1] x ... x [lo_d,hi_d] as 2d half-spaces.
ConvexBody make_box_body(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

// Local density E_{n in (Z/pZ)^d} prod_i (p/(p-1)) 1_{psi_i(n) != 0 (mod p)},
// by direct enumeration of the p^d residue tuples. Past the budget a resource
// error points at local_factor_closed.
double local_factor(const AffineSystem& sys, std::int64_t p,
                    std::uint64_t budget = 300000000ull);

// Same quantity through inclusion-exclusion over form subsets: each subset
// contributes (-1)^|S| p^{d-rank} when the subsystem is consistent mod p,
// with rank and consistency from Gaussian elimination over Z/pZ. Exact for
// every prime, O(2^t) subsets.
double local_factor_closed(const AffineSystem& sys, std::int64_t p);

// Progression-system local density in closed form:
// p <= k: (1/p)(p/(p-1))^{k-1}; p > k: (1-(k-1)/p)(p/(p-1))^{k-1}.
double kap_local_factor(int k, std::int64_t p);

// Truncated product of local densities with an explicit tail bound
// 4 t^2 sum_{p >= P0} p^{-2} (prime sum sieved, remainder integral-bounded).
struct SingularSeries {
    std::int64_t P0 = 0;
    double value = 0.0;
    double tail_bound = 0.0;
    std::vector<std::pair<std::int64_t, double>> factors;
};

SingularSeries singular_series(const AffineSystem& sys, std::int64_t P0);

// Volume of body ∩ {all forms positive}. Exact interval/polygon clipping for
// d <= 2 (std_error 0); Halton quasi-Monte Carlo over the bounding box for
// d >= 3, samples >= 1000. Returns (value, std_error).
std::pair<double, double> archimedean_volume(const AffineSystem& sys, const ConvexBody& body,
                                             std::int64_t samples = 100000);

// The d >= 3 sampling path on its own, usable at any dimension as an oracle
// against the exact route. seed offsets the Halton index deterministically.
std::pair<double, double> archimedean_volume_sampled(const AffineSystem& sys, const ConvexBody& body,
                                                     std::int64_t samples, std::uint64_t seed = 1);

// Sum over integer points of the body of prod_i weight(psi_i(n)), where
// weight is an interval signal and form values below 1 contribute factor 0.
// Form values above the table length violate the contract and throw. The
// budget is checked against the bounding-box lattice product.
double count_weighted(const AffineSystem& sys, const ConvexBody& body, const ArithSignal& weight,
                      std::uint64_t budget = 300000000ull);

// Main-term prediction at the weighted-count normalization:
// archimedean_volume * singular_series partial product.
double predict(const AffineSystem& sys, const ConvexBody& body, std::int64_t P0,
               std::int64_t samples = 100000);

// Exact number of increasing k-term progressions of primes inside [N].
std::int64_t count_prime_aps(std::int64_t N, int k, std::uint64_t budget = 300000000ull);

// Log-weighted progression count of the same region,
// sum_{d >= 1} sum_{a >= 2, a+(k-1)d <= N} prod_j 1/log(a + j d):
// the Archimedean factor at the unweighted-census normalization.
double ap_log_integral(std::int64_t N, int k);

// T = (1/log N) sum_{n,d} 1_{A'}(n) ... 1_{A'}(n+(k-1)d) Lambda'(Wd+1) where
// A' = {n : Wn+b in A} and Lambda' is the primes-only von Mangoldt weight.
// A is a membership table over [N] (A[n-1] marks n).
double shifted_prime_ap_count(const std::vector<std::uint8_t>& A, int k, std::int64_t W,
                              std::int64_t b);

// Text format, one item per line:
//   psi a1 ... ad c   (form with integer coefficients and constant)
//   hs  a1 ... ad c   (half-space a.x <= c)
// Blank lines and #-comments are skipped. The dimension is inferred from the
// first item and must be consistent.
std::pair<AffineSystem, ConvexBody> parse_system_text(const std::string& text);
std::pair<AffineSystem, ConvexBody> load_system_file(const std::string& path);

struct LinsysResult {
    std::string system_id;
    std::int64_t N = 0;
    double count = 0.0;
    double prediction = 0.0;
    double ratio = 0.0;
    double tail_bound = 0.0;
};

// CSV columns: system-id, N, count, prediction, ratio, tail-bound.
void write_results_csv(const std::vector<LinsysResult>& rows, const std::string& path);

} // namespace gowerslab
