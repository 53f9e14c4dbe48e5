#include "gowerslab/linsys.hpp"

#include "gowerslab/arith.hpp"
#include "gowerslab/errors.hpp"
#include "gowerslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gowerslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_prime_small(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

void require_prime(std::int64_t p, const char* who) {
    if (!is_prime_small(p)) throw std::invalid_argument(std::string(who) + ": p must be prime");
}

std::int64_t pow_mod(std::int64_t a, std::int64_t e, std::int64_t p) {
    std::int64_t r = 1 % p;
    a %= p;
    while (e > 0) {
        if (e & 1) r = (r * a) % p;
        a = (a * a) % p;
        e >>= 1;
    }
    return r;
}

// integer bounds robust against values like 4999.999999999999
std::int64_t floor_int(double v) { return static_cast<std::int64_t>(std::floor(v + 1e-9)); }
std::int64_t ceil_int(double v) { return static_cast<std::int64_t>(std::ceil(v - 1e-9)); }

double halton(std::uint64_t index, std::int64_t base) {
    double r = 0.0;
    double f = 1.0 / static_cast<double>(base);
    while (index > 0) {
        r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
        index /= static_cast<std::uint64_t>(base);
        f /= static_cast<double>(base);
    }
    return r;
}

using Poly = std::vector<Eigen::Vector2d>;

Poly clip_polygon(const Poly& poly, const Eigen::Vector2d& normal, double offset) {
    Poly out;
    std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& P = poly[i];
        const Eigen::Vector2d& Q = poly[(i + 1) % n];
        double dp = normal.dot(P) - offset;
        double dq = normal.dot(Q) - offset;
        bool in_p = dp <= 0.0;
        bool in_q = dq <= 0.0;
        if (in_p) out.push_back(P);
        if (in_p != in_q) {
            double denom = dp - dq;
            if (denom != 0.0) out.push_back(P + (dp / denom) * (Q - P));
        }
    }
    return out;
}

double polygon_area(const Poly& poly) {
    if (poly.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Eigen::Vector2d& P = poly[i];
        const Eigen::Vector2d& Q = poly[(i + 1) % poly.size()];
        s += P.x() * Q.y() - Q.x() * P.y();
    }
    return std::abs(s) / 2.0;
}

} // namespace

std::int64_t AffineSystem::eval(int i, const VecZ& n) const {
    const AffineForm& f = forms[static_cast<std::size_t>(i)];
    std::int64_t v = f.constant;
    for (int j = 0; j < d; ++j) v += f.coeffs[j] * n[j];
    return v;
}

void AffineSystem::validate() const {
    if (d < 1) throw std::invalid_argument("affine system: dimension must be positive");
    if (t < 1 || static_cast<std::size_t>(t) != forms.size())
        throw std::invalid_argument("affine system: needs at least one form");
    for (int i = 0; i < t; ++i) {
        const AffineForm& f = forms[static_cast<std::size_t>(i)];
        if (f.coeffs.size() != d)
            throw std::invalid_argument("affine system: coefficient vector has wrong dimension");
        bool nonzero = false;
        for (int j = 0; j < d; ++j) nonzero = nonzero || f.coeffs[j] != 0;
        if (!nonzero)
            throw std::invalid_argument("affine system: a form has an all-zero coefficient vector");
    }
    // pairwise linear independence via 2x2 minors; vacuous in dimension 1,
    // where systems like (n, n+1) are still legitimate local-factor inputs
    if (d >= 2)
        for (int i = 0; i < t; ++i)
            for (int j = i + 1; j < t; ++j) {
                const VecZ& a = forms[static_cast<std::size_t>(i)].coeffs;
                const VecZ& b = forms[static_cast<std::size_t>(j)].coeffs;
                bool independent = false;
                for (int r = 0; r < d && !independent; ++r)
                    for (int s = r + 1; s < d && !independent; ++s)
                        independent = a[r] * b[s] - a[s] * b[r] != 0;
                if (!independent)
                    throw std::invalid_argument("affine system: two forms are parallel (all 2x2 minors vanish)");
            }
}

AffineSystem make_affine_system(int d, std::vector<AffineForm> forms) {
    AffineSystem sys;
    sys.d = d;
    sys.t = static_cast<int>(forms.size());
    sys.forms = std::move(forms);
    sys.L = 0;
    for (const auto& f : sys.forms)
        for (int j = 0; j < f.coeffs.size(); ++j) sys.L = std::max(sys.L, std::abs(f.coeffs[j]));
    sys.validate();
    return sys;
}

AffineSystem ap_system(int k) {
    if (k < 2) throw std::invalid_argument("ap_system: k must be at least 2");
    std::vector<AffineForm> forms(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        forms[static_cast<std::size_t>(i)].coeffs.resize(2);
        forms[static_cast<std::size_t>(i)].coeffs << 1, i;
        forms[static_cast<std::size_t>(i)].constant = 0;
    }
    return make_affine_system(2, std::move(forms));
}

bool ConvexBody::contains(const Eigen::VectorXd& x) const {
    for (const HalfSpace& h : half_spaces)
        if (h.normal.dot(x) > h.offset) return false;
    return true;
}

bool ConvexBody::empty() const {
    for (int j = 0; j < d; ++j)
        if (box_lo[j] > box_hi[j]) return true;
    return false;
}

void ConvexBody::validate() const {
    if (d < 1) throw std::invalid_argument("convex body: dimension must be positive");
    if (box_lo.size() != d || box_hi.size() != d)
        throw std::invalid_argument("convex body: bounding box has wrong dimension");
    for (int j = 0; j < d; ++j)
        if (!std::isfinite(box_lo[j]) || !std::isfinite(box_hi[j]))
            throw std::invalid_argument("convex body: bounding box must be finite");
    for (const HalfSpace& h : half_spaces)
        if (h.normal.size() != d || !std::isfinite(h.offset))
            throw std::invalid_argument("convex body: malformed half-space");
}

ConvexBody make_convex_body(int d, std::vector<HalfSpace> half_spaces) {
    if (d < 1) throw std::invalid_argument("make_convex_body: dimension must be positive");
    ConvexBody body;
    body.d = d;
    body.box_lo = Eigen::VectorXd::Constant(d, -kInf);
    body.box_hi = Eigen::VectorXd::Constant(d, kInf);
    for (const HalfSpace& h : half_spaces) {
        if (h.normal.size() != d)
            throw std::invalid_argument("make_convex_body: half-space normal has wrong dimension");
        int nonzero = 0, coord = -1;
        for (int j = 0; j < d; ++j)
            if (h.normal[j] != 0.0) {
                ++nonzero;
                coord = j;
            }
        if (nonzero == 0)
            throw std::invalid_argument("make_convex_body: half-space normal is zero");
        if (nonzero == 1) {
            double a = h.normal[coord];
            double bound = h.offset / a;
            if (a > 0.0)
                body.box_hi[coord] = std::min(body.box_hi[coord], bound);
            else
                body.box_lo[coord] = std::max(body.box_lo[coord], bound);
        }
    }
    for (int j = 0; j < d; ++j)
        if (!std::isfinite(body.box_lo[j]) || !std::isfinite(body.box_hi[j]))
            throw std::invalid_argument(
                "make_convex_body: coordinate " + std::to_string(j + 1) +
                " is unbounded; add axis-aligned half-spaces on both sides");
    body.half_spaces = std::move(half_spaces);
    return body;
}

ConvexBody make_box_body(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    if (lo.size() != hi.size() || lo.size() < 1)
        throw std::invalid_argument("make_box_body: inconsistent bounds");
    int d = static_cast<int>(lo.size());
    std::vector<HalfSpace> hs;
    hs.reserve(static_cast<std::size_t>(2 * d));
    for (int j = 0; j < d; ++j) {
        HalfSpace upper;
        upper.normal = Eigen::VectorXd::Zero(d);
        upper.normal[j] = 1.0;
        upper.offset = hi[j];
        HalfSpace lower;
        lower.normal = Eigen::VectorXd::Zero(d);
        lower.normal[j] = -1.0;
        lower.offset = -lo[j];
        hs.push_back(std::move(upper));
        hs.push_back(std::move(lower));
    }
    return make_convex_body(d, std::move(hs));
}

double local_factor(const AffineSystem& sys, std::int64_t p, std::uint64_t budget) {
    require_prime(p, "local_factor");
    sys.validate();
    double tuples = std::pow(static_cast<double>(p), sys.d);
    if (tuples > static_cast<double>(budget))
        throw resource_error("local_factor: p^d residue tuples exceed the budget; "
                             "use local_factor_closed");
    int d = sys.d, t = sys.t;
    std::vector<std::int64_t> cmod(static_cast<std::size_t>(t) * d);
    std::vector<std::int64_t> kmod(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) {
        for (int j = 0; j < d; ++j)
            cmod[static_cast<std::size_t>(i) * d + j] =
                ((sys.forms[static_cast<std::size_t>(i)].coeffs[j] % p) + p) % p;
        kmod[static_cast<std::size_t>(i)] =
            ((sys.forms[static_cast<std::size_t>(i)].constant % p) + p) % p;
    }
    auto count = blocked_reduce<std::uint64_t>(
        static_cast<std::size_t>(p), 8, [&](std::size_t lo, std::size_t hi) {
            std::uint64_t acc = 0;
            std::vector<std::int64_t> partial(static_cast<std::size_t>(t));
            std::vector<std::int64_t> x(static_cast<std::size_t>(d), 0);
            auto descend = [&](auto&& self, int level) -> void {
                if (level == d) {
                    for (int i = 0; i < t; ++i)
                        if (partial[static_cast<std::size_t>(i)] % p == 0) return;
                    ++acc;
                    return;
                }
                for (std::int64_t v = 0; v < p; ++v) {
                    for (int i = 0; i < t; ++i)
                        partial[static_cast<std::size_t>(i)] +=
                            cmod[static_cast<std::size_t>(i) * d + level] * v;
                    self(self, level + 1);
                    for (int i = 0; i < t; ++i)
                        partial[static_cast<std::size_t>(i)] -=
                            cmod[static_cast<std::size_t>(i) * d + level] * v;
                }
            };
            for (std::size_t xs = lo; xs < hi; ++xs) {
                std::int64_t x0 = static_cast<std::int64_t>(xs);
                for (int i = 0; i < t; ++i)
                    partial[static_cast<std::size_t>(i)] =
                        kmod[static_cast<std::size_t>(i)] +
                        cmod[static_cast<std::size_t>(i) * d + 0] * x0;
                descend(descend, 1);
            }
            return acc;
        });
    double ratio = static_cast<double>(p) / static_cast<double>(p - 1);
    return static_cast<double>(count) * std::pow(ratio, t) / tuples;
}

double local_factor_closed(const AffineSystem& sys, std::int64_t p) {
    require_prime(p, "local_factor_closed");
    sys.validate();
    int d = sys.d, t = sys.t;
    if (t > 30) throw std::invalid_argument("local_factor_closed: too many forms for subset expansion");
    if (static_cast<double>(d) * std::log2(static_cast<double>(p)) > 62.0)
        throw std::overflow_error("local_factor_closed: p^d exceeds 64-bit range");
    std::int64_t pd = 1;
    for (int j = 0; j < d; ++j) pd *= p;

    std::vector<std::vector<std::int64_t>> rows; // working Gauss rows, d+1 wide (last = rhs)
    std::int64_t total = 0;
    for (std::uint32_t mask = 0; mask < (1u << t); ++mask) {
        int size = std::popcount(mask);
        if (size == 0) {
            total += pd;
            continue;
        }
        rows.assign(static_cast<std::size_t>(size), std::vector<std::int64_t>(static_cast<std::size_t>(d) + 1, 0));
        int r = 0;
        for (int i = 0; i < t; ++i) {
            if (!(mask & (1u << i))) continue;
            for (int j = 0; j < d; ++j)
                rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
                    ((sys.forms[static_cast<std::size_t>(i)].coeffs[j] % p) + p) % p;
            rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(d)] =
                ((-sys.forms[static_cast<std::size_t>(i)].constant % p) + p) % p;
            ++r;
        }
        int rank = 0;
        for (int col = 0; col < d && rank < size; ++col) {
            int pivot = -1;
            for (int i = rank; i < size; ++i)
                if (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] != 0) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) continue;
            std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pivot)]);
            std::int64_t inv = pow_mod(rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)], p - 2, p);
            for (int j = col; j <= d; ++j)
                rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(j)] =
                    (rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(j)] * inv) % p;
            for (int i = rank + 1; i < size; ++i) {
                std::int64_t f = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
                if (f == 0) continue;
                for (int j = col; j <= d; ++j) {
                    std::int64_t v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                     f * rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(j)] % p;
                    rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ((v % p) + p) % p;
                }
            }
            ++rank;
        }
        bool consistent = true;
        for (int i = rank; i < size && consistent; ++i)
            consistent = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] == 0;
        if (!consistent) continue;
        std::int64_t solutions = 1;
        for (int j = 0; j < d - rank; ++j) solutions *= p;
        total += (size % 2 == 0) ? solutions : -solutions;
    }
    double ratio = static_cast<double>(p) / static_cast<double>(p - 1);
    return static_cast<double>(total) * std::pow(ratio, t) / static_cast<double>(pd);
}

double kap_local_factor(int k, std::int64_t p) {
    if (k < 2) throw std::invalid_argument("kap_local_factor: k must be at least 2");
    require_prime(p, "kap_local_factor");
    double ratio = static_cast<double>(p) / static_cast<double>(p - 1);
    double shell = std::pow(ratio, k - 1);
    if (p <= k) return shell / static_cast<double>(p);
    return (1.0 - static_cast<double>(k - 1) / static_cast<double>(p)) * shell;
}

SingularSeries singular_series(const AffineSystem& sys, std::int64_t P0) {
    if (P0 < 2) throw std::invalid_argument("singular_series: P0 must be at least 2");
    sys.validate();
    SingularSeries out;
    out.P0 = P0;
    out.value = 1.0;
    for (std::int64_t p : primes_below(static_cast<double>(P0))) {
        double f = local_factor_closed(sys, p);
        out.factors.emplace_back(p, f);
        if (f == 0.0) {
            out.value = 0.0;
            break;
        }
        out.value *= f;
    }
    std::int64_t limit = std::max<std::int64_t>(1000000, P0);
    double s = 0.0;
    for (std::int64_t p : primes_up_to(static_cast<std::uint64_t>(limit)))
        if (p >= P0) s += 1.0 / (static_cast<double>(p) * static_cast<double>(p));
    s += 1.0 / (static_cast<double>(limit) * std::log(static_cast<double>(limit)));
    out.tail_bound = 4.0 * static_cast<double>(sys.t) * static_cast<double>(sys.t) * s;
    return out;
}

std::pair<double, double> archimedean_volume(const AffineSystem& sys, const ConvexBody& body,
                                             std::int64_t samples) {
    sys.validate();
    body.validate();
    if (sys.d != body.d)
        throw std::invalid_argument("archimedean_volume: system and body dimensions differ");
    if (body.empty()) return {0.0, 0.0};
    if (sys.d == 1) {
        double lo = body.box_lo[0], hi = body.box_hi[0];
        for (const HalfSpace& h : body.half_spaces) {
            double a = h.normal[0];
            if (a > 0.0) hi = std::min(hi, h.offset / a);
            else if (a < 0.0) lo = std::max(lo, h.offset / a);
        }
        for (const AffineForm& f : sys.forms) {
            double a = static_cast<double>(f.coeffs[0]);
            double bound = -static_cast<double>(f.constant) / a;
            if (a > 0.0) lo = std::max(lo, bound);
            else hi = std::min(hi, bound);
        }
        return {std::max(0.0, hi - lo), 0.0};
    }
    if (sys.d == 2) {
        Poly poly = {{body.box_lo[0], body.box_lo[1]},
                     {body.box_hi[0], body.box_lo[1]},
                     {body.box_hi[0], body.box_hi[1]},
                     {body.box_lo[0], body.box_hi[1]}};
        for (const HalfSpace& h : body.half_spaces) {
            poly = clip_polygon(poly, h.normal, h.offset);
            if (poly.empty()) return {0.0, 0.0};
        }
        for (const AffineForm& f : sys.forms) {
            Eigen::Vector2d n(-static_cast<double>(f.coeffs[0]), -static_cast<double>(f.coeffs[1]));
            poly = clip_polygon(poly, n, static_cast<double>(f.constant));
            if (poly.empty()) return {0.0, 0.0};
        }
        return {polygon_area(poly), 0.0};
    }
    return archimedean_volume_sampled(sys, body, samples);
}

std::pair<double, double> archimedean_volume_sampled(const AffineSystem& sys, const ConvexBody& body,
                                                     std::int64_t samples, std::uint64_t seed) {
    sys.validate();
    body.validate();
    if (sys.d != body.d)
        throw std::invalid_argument("archimedean_volume_sampled: system and body dimensions differ");
    if (samples < 1000)
        throw std::invalid_argument("archimedean_volume_sampled: need at least 1000 samples");
    if (body.empty()) return {0.0, 0.0};
    int d = body.d;
    auto small_primes = primes_up_to(200);
    if (static_cast<std::size_t>(d) > small_primes.size())
        throw std::invalid_argument("archimedean_volume_sampled: dimension too large for the Halton bases");
    double boxvol = 1.0;
    for (int j = 0; j < d; ++j) boxvol *= body.box_hi[j] - body.box_lo[j];
    if (boxvol <= 0.0) return {0.0, 0.0};
    auto hits = blocked_reduce<std::int64_t>(
        static_cast<std::size_t>(samples), 4096, [&](std::size_t lo, std::size_t hi) {
            std::int64_t acc = 0;
            Eigen::VectorXd x(d);
            for (std::size_t i = lo; i < hi; ++i) {
                std::uint64_t index = seed + static_cast<std::uint64_t>(i) + 1;
                for (int j = 0; j < d; ++j)
                    x[j] = body.box_lo[j] +
                           (body.box_hi[j] - body.box_lo[j]) * halton(index, small_primes[static_cast<std::size_t>(j)]);
                if (!body.contains(x)) continue;
                bool positive = true;
                for (int i2 = 0; i2 < sys.t && positive; ++i2) {
                    double v = static_cast<double>(sys.forms[static_cast<std::size_t>(i2)].constant);
                    for (int j = 0; j < d; ++j)
                        v += static_cast<double>(sys.forms[static_cast<std::size_t>(i2)].coeffs[j]) * x[j];
                    positive = v > 0.0;
                }
                if (positive) ++acc;
            }
            return acc;
        });
    double phat = static_cast<double>(hits) / static_cast<double>(samples);
    double se = boxvol * std::sqrt(std::max(0.0, phat * (1.0 - phat) / static_cast<double>(samples)));
    return {boxvol * phat, se};
}

double count_weighted(const AffineSystem& sys, const ConvexBody& body, const ArithSignal& weight,
                      std::uint64_t budget) {
    sys.validate();
    body.validate();
    if (sys.d != body.d)
        throw std::invalid_argument("count_weighted: system and body dimensions differ");
    if (weight.domain != Domain::interval)
        throw std::invalid_argument("count_weighted: weight must be an interval signal");
    if (body.empty()) return 0.0;
    int d = sys.d, t = sys.t;
    std::vector<std::int64_t> ilo(static_cast<std::size_t>(d)), ihi(static_cast<std::size_t>(d));
    double points = 1.0;
    for (int j = 0; j < d; ++j) {
        ilo[static_cast<std::size_t>(j)] = ceil_int(body.box_lo[j]);
        ihi[static_cast<std::size_t>(j)] = floor_int(body.box_hi[j]);
        if (ilo[static_cast<std::size_t>(j)] > ihi[static_cast<std::size_t>(j)]) return 0.0;
        points *= static_cast<double>(ihi[static_cast<std::size_t>(j)] - ilo[static_cast<std::size_t>(j)] + 1);
    }
    if (points > static_cast<double>(budget))
        throw resource_error("count_weighted: bounding box holds " + std::to_string(points) +
                             " lattice points, over the budget");

    // each half-space is applied exactly at its last nonzero coordinate
    std::vector<std::vector<const HalfSpace*>> at_level(static_cast<std::size_t>(d));
    for (const HalfSpace& h : body.half_spaces) {
        int last = -1;
        for (int j = 0; j < d; ++j)
            if (h.normal[j] != 0.0) last = j;
        at_level[static_cast<std::size_t>(last)].push_back(&h);
    }

    const std::int64_t wlen = weight.length();
    std::vector<double> wr(static_cast<std::size_t>(wlen));
    for (std::int64_t n = 0; n < wlen; ++n)
        wr[static_cast<std::size_t>(n)] = weight.values[n].real();
    std::atomic<std::int64_t> oversized{-1};

    std::size_t n0 = static_cast<std::size_t>(ihi[0] - ilo[0] + 1);
    double total = blocked_reduce<double>(n0, 16, [&](std::size_t blo, std::size_t bhi) {
        double acc = 0.0;
        std::vector<std::int64_t> x(static_cast<std::size_t>(d), 0);
        std::vector<std::int64_t> partial(static_cast<std::size_t>(t), 0);
        auto range_at = [&](int level, std::int64_t& lo, std::int64_t& hi) {
            lo = ilo[static_cast<std::size_t>(level)];
            hi = ihi[static_cast<std::size_t>(level)];
            for (const HalfSpace* h : at_level[static_cast<std::size_t>(level)]) {
                double s = 0.0;
                for (int j = 0; j < level; ++j) s += h->normal[j] * static_cast<double>(x[static_cast<std::size_t>(j)]);
                double a = h->normal[level];
                double bound = (h->offset - s) / a;
                if (a > 0.0) hi = std::min(hi, floor_int(bound));
                else lo = std::max(lo, ceil_int(bound));
            }
        };
        auto descend = [&](auto&& self, int level) -> void {
            std::int64_t lo, hi;
            range_at(level, lo, hi);
            if (level == d - 1) {
                for (std::int64_t v = lo; v <= hi; ++v) {
                    double prod = 1.0;
                    for (int i = 0; i < t; ++i) {
                        std::int64_t psi = partial[static_cast<std::size_t>(i)] +
                                           sys.forms[static_cast<std::size_t>(i)].coeffs[level] * v;
                        if (psi < 1) {
                            prod = 0.0;
                            break;
                        }
                        if (psi > wlen) {
                            oversized.store(psi, std::memory_order_relaxed);
                            prod = 0.0;
                            break;
                        }
                        prod *= wr[static_cast<std::size_t>(psi - 1)];
                        if (prod == 0.0) break;
                    }
                    acc += prod;
                }
                return;
            }
            for (std::int64_t v = lo; v <= hi; ++v) {
                x[static_cast<std::size_t>(level)] = v;
                for (int i = 0; i < t; ++i)
                    partial[static_cast<std::size_t>(i)] += sys.forms[static_cast<std::size_t>(i)].coeffs[level] * v;
                self(self, level + 1);
                for (int i = 0; i < t; ++i)
                    partial[static_cast<std::size_t>(i)] -= sys.forms[static_cast<std::size_t>(i)].coeffs[level] * v;
            }
        };
        for (std::size_t b = blo; b < bhi; ++b) {
            std::int64_t x0 = ilo[0] + static_cast<std::int64_t>(b);
            if (d == 1) {
                // degenerate: the single coordinate is also the leaf level
                for (int i = 0; i < t; ++i) partial[static_cast<std::size_t>(i)] = sys.forms[static_cast<std::size_t>(i)].constant;
                std::int64_t lo, hi;
                range_at(0, lo, hi);
                if (x0 < lo || x0 > hi) continue;
                double prod = 1.0;
                for (int i = 0; i < t; ++i) {
                    std::int64_t psi = partial[static_cast<std::size_t>(i)] +
                                       sys.forms[static_cast<std::size_t>(i)].coeffs[0] * x0;
                    if (psi < 1 || psi > wlen) {
                        if (psi > wlen) oversized.store(psi, std::memory_order_relaxed);
                        prod = 0.0;
                        break;
                    }
                    prod *= wr[static_cast<std::size_t>(psi - 1)];
                    if (prod == 0.0) break;
                }
                acc += prod;
                continue;
            }
            std::int64_t lo, hi;
            x[0] = x0;
            range_at(0, lo, hi);
            if (x0 < lo || x0 > hi) continue;
            for (int i = 0; i < t; ++i)
                partial[static_cast<std::size_t>(i)] =
                    sys.forms[static_cast<std::size_t>(i)].constant +
                    sys.forms[static_cast<std::size_t>(i)].coeffs[0] * x0;
            descend(descend, 1);
        }
        return acc;
    });
    std::int64_t bad = oversized.load(std::memory_order_relaxed);
    if (bad >= 0)
        throw std::invalid_argument("count_weighted: form value " + std::to_string(bad) +
                                    " exceeds the weight table length " + std::to_string(wlen));
    return total;
}

double predict(const AffineSystem& sys, const ConvexBody& body, std::int64_t P0,
               std::int64_t samples) {
    double vol = archimedean_volume(sys, body, samples).first;
    return vol * singular_series(sys, P0).value;
}

std::int64_t count_prime_aps(std::int64_t N, int k, std::uint64_t budget) {
    if (k < 2) throw std::invalid_argument("count_prime_aps: k must be at least 2");
    if (N < 1) throw std::invalid_argument("count_prime_aps: N must be positive");
    auto primes = primes_up_to(static_cast<std::uint64_t>(N));
    std::vector<std::uint8_t> isp(static_cast<std::size_t>(N) + 1, 0);
    for (std::int64_t p : primes) isp[static_cast<std::size_t>(p)] = 1;
    std::uint64_t work = 0;
    for (std::int64_t p : primes) work += static_cast<std::uint64_t>((N - p) / (k - 1));
    if (work > budget)
        throw resource_error("count_prime_aps: ~" + std::to_string(work) +
                             " inner steps exceed the budget");
    auto total = blocked_reduce<std::uint64_t>(primes.size(), 64, [&](std::size_t lo, std::size_t hi) {
        std::uint64_t acc = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            std::int64_t a = primes[i];
            std::int64_t dmax = (N - a) / (k - 1);
            for (std::int64_t step = 1; step <= dmax; ++step) {
                bool all = true;
                std::int64_t v = a;
                for (int j = 1; j < k && all; ++j) {
                    v += step;
                    all = isp[static_cast<std::size_t>(v)] != 0;
                }
                if (all) ++acc;
            }
        }
        return acc;
    });
    return static_cast<std::int64_t>(total);
}

double ap_log_integral(std::int64_t N, int k) {
    if (k < 2) throw std::invalid_argument("ap_log_integral: k must be at least 2");
    if (N < 2) throw std::invalid_argument("ap_log_integral: N must be at least 2");
    std::int64_t dmax = (N - 2) / (k - 1);
    if (dmax < 1) return 0.0;
    std::vector<double> inv(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::int64_t n = 2; n <= N; ++n) inv[static_cast<std::size_t>(n)] = 1.0 / std::log(static_cast<double>(n));
    return blocked_reduce<double>(static_cast<std::size_t>(dmax), 16, [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t ds = lo; ds < hi; ++ds) {
            std::int64_t step = static_cast<std::int64_t>(ds) + 1;
            std::int64_t amax = N - (k - 1) * step;
            if (k == 3) {
                const double* base = inv.data();
                for (std::int64_t a = 2; a <= amax; ++a)
                    acc += base[a] * base[a + step] * base[a + 2 * step];
            } else {
                for (std::int64_t a = 2; a <= amax; ++a) {
                    double prod = 1.0;
                    for (int j = 0; j < k; ++j) prod *= inv[static_cast<std::size_t>(a + j * step)];
                    acc += prod;
                }
            }
        }
        return acc;
    });
}

double shifted_prime_ap_count(const std::vector<std::uint8_t>& A, int k, std::int64_t W,
                              std::int64_t b) {
    if (k < 3) throw std::invalid_argument("shifted_prime_ap_count: k must be at least 3");
    std::int64_t N = static_cast<std::int64_t>(A.size());
    if (N < 2) throw std::invalid_argument("shifted_prime_ap_count: need a table over [N], N >= 2");
    if (W < 1 || b < 1 || b > W)
        throw std::invalid_argument("shifted_prime_ap_count: need 1 <= b <= W");
    std::int64_t L = (N - b) / W;
    if (L < k) return 0.0;
    std::vector<std::uint8_t> shifted(static_cast<std::size_t>(L) + 1, 0);
    for (std::int64_t n = 1; n <= L; ++n)
        shifted[static_cast<std::size_t>(n)] = A[static_cast<std::size_t>(W * n + b - 1)];
    FactorTable table = FactorTable::build(static_cast<std::uint64_t>(N));
    auto lam = von_mangoldt_table(table, static_cast<std::uint64_t>(N), true);
    std::int64_t dmax = (L - 1) / (k - 1);
    double total = blocked_reduce<double>(static_cast<std::size_t>(dmax), 16, [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t ds = lo; ds < hi; ++ds) {
            std::int64_t step = static_cast<std::int64_t>(ds) + 1;
            double w = lam[static_cast<std::size_t>(W * step + 1)];
            if (w == 0.0) continue;
            std::int64_t cnt = 0;
            for (std::int64_t n = 1; n + (k - 1) * step <= L; ++n) {
                bool all = true;
                for (int j = 0; j < k && all; ++j) all = shifted[static_cast<std::size_t>(n + j * step)] != 0;
                if (all) ++cnt;
            }
            acc += w * static_cast<double>(cnt);
        }
        return acc;
    });
    return total / std::log(static_cast<double>(N));
}

std::pair<AffineSystem, ConvexBody> parse_system_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int d = -1;
    std::vector<AffineForm> forms;
    std::vector<HalfSpace> halves;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        std::vector<double> vals;
        double v;
        while (ls >> v) vals.push_back(v);
        if (vals.size() < 2)
            throw std::invalid_argument("system text line " + std::to_string(lineno) +
                                        ": need at least one coefficient and a constant");
        int dline = static_cast<int>(vals.size()) - 1;
        if (d < 0) d = dline;
        if (dline != d)
            throw std::invalid_argument("system text line " + std::to_string(lineno) +
                                        ": dimension mismatch");
        if (tag == "psi") {
            AffineForm f;
            f.coeffs.resize(d);
            for (int j = 0; j <= d; ++j) {
                double rounded = std::rint(vals[static_cast<std::size_t>(j)]);
                if (rounded != vals[static_cast<std::size_t>(j)])
                    throw std::invalid_argument("system text line " + std::to_string(lineno) +
                                                ": psi entries must be integers");
                if (j < d) f.coeffs[j] = static_cast<std::int64_t>(rounded);
                else f.constant = static_cast<std::int64_t>(rounded);
            }
            forms.push_back(std::move(f));
        } else if (tag == "hs") {
            HalfSpace h;
            h.normal = Eigen::VectorXd(d);
            for (int j = 0; j < d; ++j) h.normal[j] = vals[static_cast<std::size_t>(j)];
            h.offset = vals[static_cast<std::size_t>(d)];
            halves.push_back(std::move(h));
        } else {
            throw std::invalid_argument("system text line " + std::to_string(lineno) +
                                        ": unknown item '" + tag + "'");
        }
    }
    if (forms.empty()) throw std::invalid_argument("system text: no psi lines");
    if (halves.empty()) throw std::invalid_argument("system text: no hs lines");
    return {make_affine_system(d, std::move(forms)), make_convex_body(d, std::move(halves))};
}

std::pair<AffineSystem, ConvexBody> load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_system_file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system_text(buf.str());
}

void write_results_csv(const std::vector<LinsysResult>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
    out << "system-id,N,count,prediction,ratio,tail-bound\n";
    char buf[160];
    for (const LinsysResult& r : rows) {
        std::snprintf(buf, sizeof buf, ",%lld,%.12g,%.12g,%.12g,%.12g\n",
                      static_cast<long long>(r.N), r.count, r.prediction, r.ratio, r.tail_bound);
        out << r.system_id << buf;
    }
    if (!out) throw std::runtime_error("write_results_csv: write failed for " + path);
}

} // namespace gowerslab
