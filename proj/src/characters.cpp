#include "gowerslab/characters.hpp"

#include "gowerslab/errors.hpp"
#include "gowerslab/fft.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

namespace gowerslab {

namespace {

// nonnegative remainder
std::int64_t mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

bool squarefree_small(std::int64_t m) {
    for (std::int64_t i = 2; i * i <= m; ++i)
        if (m % (i * i) == 0) return false;
    return true;
}

// Integer correlation sum over Z/qZ: sum over h of (sum_n g(n) g(n+h))^2,
// the degree-2 box sum regrouped through the autocorrelation.
std::int64_t box_sum_2(const std::vector<std::int64_t>& g) {
    std::int64_t q = static_cast<std::int64_t>(g.size());
    std::int64_t total = 0;
    for (std::int64_t h = 0; h < q; ++h) {
        std::int64_t a = 0;
        for (std::int64_t n = 0; n < q; ++n) a += g[n] * g[(n + h) % q];
        total += a * a;
    }
    return total;
}

std::int64_t box_sum_k(const std::vector<std::int64_t>& g, int k) {
    if (k == 2) return box_sum_2(g);
    std::int64_t q = static_cast<std::int64_t>(g.size());
    std::int64_t total = 0;
    std::vector<std::int64_t> diff(q);
    for (std::int64_t h = 0; h < q; ++h) {
        for (std::int64_t n = 0; n < q; ++n) diff[n] = g[n] * g[(n + h) % q];
        total += box_sum_k(diff, k - 1);
    }
    return total;
}

} // namespace

int kronecker_symbol(std::int64_t a, std::int64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -1;
    }
    if (n % 2 == 0) {
        if (a % 2 == 0) return 0;
        int t = 0;
        while (n % 2 == 0) {
            n /= 2;
            ++t;
        }
        std::int64_t a8 = mod(a, 8);
        if (t % 2 == 1 && (a8 == 3 || a8 == 5)) sign = -sign;
    }
    a = mod(a, n);
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            std::int64_t n8 = n % 8;
            if (n8 == 3 || n8 == 5) sign = -sign;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) sign = -sign;
        a %= n;
    }
    return n == 1 ? sign : 0;
}

int DirichletCharacter::operator()(std::int64_t n) const {
    if (trivial) return 1;
    return kronecker_symbol(D, n);
}

std::vector<std::int8_t> DirichletCharacter::period_table() const {
    std::vector<std::int8_t> tab(static_cast<std::size_t>(q));
    for (std::int64_t n = 0; n < q; ++n) tab[n] = static_cast<std::int8_t>((*this)(n));
    return tab;
}

DirichletCharacter make_real_character(std::int64_t q) {
    if (q < 1) throw conductor_error("make_real_character: conductor must be positive");
    DirichletCharacter chi;
    if (q == 1) return chi; // trivial character

    std::int64_t m = q;
    int e = 0;
    while (m % 2 == 0) {
        m /= 2;
        ++e;
    }
    if (!squarefree_small(m))
        throw conductor_error("make_real_character: odd part " + std::to_string(m) +
                              " of conductor " + std::to_string(q) + " is not squarefree");
    if (e == 1)
        throw conductor_error("make_real_character: even conductor " + std::to_string(q) +
                              " must be divisible by 4");
    if (e > 3)
        throw conductor_error("make_real_character: power-of-two part of conductor " +
                              std::to_string(q) + " exceeds 8");

    std::int64_t D;
    if (e == 0) {
        D = m % 4 == 1 ? q : -q;
    } else if (e == 2) {
        D = m % 4 == 3 ? q : -q;
    } else {
        D = q; // both signs are admissible at the 8*odd shape; fix the positive one
    }
    chi.q = q;
    chi.D = D;
    chi.trivial = false;
    return chi;
}

double char_gowers_norm(const DirichletCharacter& chi, int k, std::uint64_t budget) {
    if (k < 1) throw std::invalid_argument("char_gowers_norm: k must be >= 1");
    std::int64_t q = chi.q;
    if (q == 1) return 1.0;

    auto tab8 = chi.period_table();
    if (k == 1) {
        std::int64_t s = 0;
        for (auto v : tab8) s += v;
        return std::abs(static_cast<double>(s)) / static_cast<double>(q);
    }

    // correlation sums are integers; guard the 64-bit range and the work bound
    long double box_points = std::pow(static_cast<long double>(q), k + 1);
    if (box_points > 8.5e18L)
        throw resource_error("char_gowers_norm: correlation sum exceeds 64-bit range at q=" +
                             std::to_string(q) + ", k=" + std::to_string(k));
    long double work = std::pow(static_cast<long double>(q), k);
    if (work > static_cast<long double>(budget)) {
        if (k == 2) {
            // spectral route: fourth moment of the unnormalized spectrum
            Eigen::ArrayXcd f(q);
            for (std::int64_t n = 0; n < q; ++n) f[n] = static_cast<double>(tab8[n]);
            Eigen::ArrayXcd F = dft_forward(f);
            double s = 0;
            for (std::int64_t xi = 0; xi < q; ++xi) {
                double m2 = std::norm(F[xi]);
                s += m2 * m2;
            }
            double raised = s / static_cast<double>(q); // box sum
            return std::pow(raised / std::pow(static_cast<double>(q), 3), 0.25);
        }
        throw resource_error("char_gowers_norm: enumeration budget exceeded at q=" +
                             std::to_string(q) + ", k=" + std::to_string(k) +
                             "; the k=2 spectral route stays cheap");
    }

    std::vector<std::int64_t> g(tab8.begin(), tab8.end());
    std::int64_t box = box_sum_k(g, k);
    long double raised = static_cast<long double>(box) / box_points;
    return static_cast<double>(std::pow(raised, 1.0L / (1 << k)));
}

} // namespace gowerslab
