#include "gowerslab/decomp.hpp"

#include "gowerslab/arith.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gowerslab {

namespace {

std::int64_t cube_root_floor(std::int64_t N) {
    std::int64_t v = static_cast<std::int64_t>(std::llround(std::cbrt(static_cast<double>(N))));
    while (v > 1 && v * v * v > N) --v;
    while ((v + 1) * (v + 1) * (v + 1) <= N) ++v;
    return v;
}

// character values over [0, N]; all ones when no twist is active
std::vector<double> twist_table(std::int64_t N, const SiegelConfig* twist) {
    std::vector<double> chiv(static_cast<std::size_t>(N) + 1, 1.0);
    if (twist != nullptr) {
        chiv[0] = 0.0;
        for (std::int64_t n = 1; n <= N; ++n)
            chiv[static_cast<std::size_t>(n)] = static_cast<double>(twist->chi(n));
    }
    return chiv;
}

ArithSignal zero_interval(std::int64_t N, const std::string& label) {
    ArithSignal f = ones_signal(Domain::interval, N);
    f.values.setZero();
    f.real_valued = true;
    f.label = label;
    return f;
}

} // namespace

const char* component_kind_name(ComponentKind k) {
    switch (k) {
    case ComponentKind::type_i: return "TypeI";
    case ComponentKind::twisted_type_i: return "TwistedTypeI";
    case ComponentKind::type_ii: return "TypeII";
    case ComponentKind::negligible: return "Negligible";
    }
    return "unknown";
}

VaughanDecomposition vaughan_lambda(std::int64_t N, const SiegelConfig* twist) {
    if (N < 2) throw std::invalid_argument("vaughan_lambda: N must be at least 2");
    FactorTable table = FactorTable::build(static_cast<std::uint64_t>(N));
    auto mu = moebius_table(table, static_cast<std::uint64_t>(N));
    auto lam = von_mangoldt_table(table, static_cast<std::uint64_t>(N));
    auto chiv = twist_table(N, twist);
    std::int64_t V = cube_root_floor(N);
    ComponentKind t1kind = twist ? ComponentKind::twisted_type_i : ComponentKind::type_i;

    VaughanDecomposition dec;
    dec.N = N;
    dec.target = VaughanDecomposition::Target::lambda;
    dec.cut1 = std::cbrt(static_cast<double>(N));
    dec.cut2 = dec.cut1 * dec.cut1;
    dec.target_signal = zero_interval(N, twist ? "lambda_twisted" : "lambda");
    for (std::int64_t n = 1; n <= N; ++n)
        dec.target_signal.values[n - 1] = lam[static_cast<std::size_t>(n)] * chiv[static_cast<std::size_t>(n)];

    DecompComponent neg;
    neg.kind = ComponentKind::negligible;
    neg.value = zero_interval(N, "lambda_small");
    for (std::int64_t n = 1; n <= V; ++n)
        neg.value.values[n - 1] = lam[static_cast<std::size_t>(n)] * chiv[static_cast<std::size_t>(n)];

    DecompComponent t1log;
    t1log.kind = t1kind;
    t1log.value = zero_interval(N, "type_i_log");
    t1log.coeff_a.assign(static_cast<std::size_t>(V) + 1, 0.0);
    for (std::int64_t d = 1; d <= V; ++d) {
        if (mu[static_cast<std::size_t>(d)] == 0) continue;
        double coef = static_cast<double>(mu[static_cast<std::size_t>(d)]) * chiv[static_cast<std::size_t>(d)];
        t1log.coeff_a[static_cast<std::size_t>(d)] = coef;
        if (coef == 0.0) continue;
        for (std::int64_t m = 1; d * m <= N; ++m)
            t1log.value.values[d * m - 1] +=
                coef * std::log(static_cast<double>(m)) * chiv[static_cast<std::size_t>(m)];
    }

    DecompComponent t1;
    t1.kind = t1kind;
    t1.value = zero_interval(N, "type_i");
    t1.coeff_a.assign(static_cast<std::size_t>(V * V) + 1, 0.0);
    for (std::int64_t b = 1; b <= V; ++b) {
        if (mu[static_cast<std::size_t>(b)] == 0) continue;
        double mb = static_cast<double>(mu[static_cast<std::size_t>(b)]) * chiv[static_cast<std::size_t>(b)];
        for (std::int64_t c = 1; c <= V; ++c) {
            double lc = lam[static_cast<std::size_t>(c)];
            if (lc == 0.0) continue;
            t1.coeff_a[static_cast<std::size_t>(b * c)] += mb * lc * chiv[static_cast<std::size_t>(c)];
        }
    }
    for (std::int64_t d = 1; d <= V * V && d <= N; ++d) {
        double ad = t1.coeff_a[static_cast<std::size_t>(d)];
        if (ad == 0.0) continue;
        for (std::int64_t m = 1; d * m <= N; ++m)
            t1.value.values[d * m - 1] -= ad * chiv[static_cast<std::size_t>(m)];
    }

    DecompComponent t2;
    t2.kind = ComponentKind::type_ii;
    t2.value = zero_interval(N, "type_ii");
    std::int64_t wmax = N / (V + 1);
    t2.coeff_b.assign(static_cast<std::size_t>(wmax) + 1, 0.0);
    for (std::int64_t c = V + 1; c <= wmax; ++c) {
        if (mu[static_cast<std::size_t>(c)] == 0) continue;
        double mc = static_cast<double>(mu[static_cast<std::size_t>(c)]) * chiv[static_cast<std::size_t>(c)];
        for (std::int64_t j = 1; c * j <= wmax; ++j)
            t2.coeff_b[static_cast<std::size_t>(c * j)] += mc * chiv[static_cast<std::size_t>(j)];
    }
    for (std::int64_t u = V + 1; u <= N; ++u) {
        double lu = lam[static_cast<std::size_t>(u)];
        if (lu == 0.0) continue;
        lu *= chiv[static_cast<std::size_t>(u)];
        if (lu == 0.0) continue;
        for (std::int64_t w = 1; u * w <= N; ++w)
            t2.value.values[u * w - 1] += lu * t2.coeff_b[static_cast<std::size_t>(w)];
    }

    dec.components = {std::move(neg), std::move(t1log), std::move(t1), std::move(t2)};
    return dec;
}

VaughanDecomposition vaughan_mu(std::int64_t N, const SiegelConfig* twist) {
    if (N < 2) throw std::invalid_argument("vaughan_mu: N must be at least 2");
    FactorTable table = FactorTable::build(static_cast<std::uint64_t>(N));
    auto mu = moebius_table(table, static_cast<std::uint64_t>(N));
    auto chiv = twist_table(N, twist);
    std::int64_t V = cube_root_floor(N);
    ComponentKind t1kind = twist ? ComponentKind::twisted_type_i : ComponentKind::type_i;

    VaughanDecomposition dec;
    dec.N = N;
    dec.target = VaughanDecomposition::Target::mu;
    dec.cut1 = std::cbrt(static_cast<double>(N));
    dec.cut2 = dec.cut1 * dec.cut1;
    dec.target_signal = zero_interval(N, twist ? "mu_twisted" : "mu");
    for (std::int64_t n = 1; n <= N; ++n)
        dec.target_signal.values[n - 1] =
            static_cast<double>(mu[static_cast<std::size_t>(n)]) * chiv[static_cast<std::size_t>(n)];

    // the doubled small-n term: subtracting the two truncated squares from the
    // full square leaves 2 mu_{<=V} over and above the target
    DecompComponent neg;
    neg.kind = ComponentKind::negligible;
    neg.value = zero_interval(N, "mu_small");
    for (std::int64_t n = 1; n <= V; ++n)
        neg.value.values[n - 1] =
            2.0 * static_cast<double>(mu[static_cast<std::size_t>(n)]) * chiv[static_cast<std::size_t>(n)];

    DecompComponent t1;
    t1.kind = t1kind;
    t1.value = zero_interval(N, "type_i");
    t1.coeff_a.assign(static_cast<std::size_t>(V * V) + 1, 0.0);
    for (std::int64_t b = 1; b <= V; ++b) {
        if (mu[static_cast<std::size_t>(b)] == 0) continue;
        double mb = static_cast<double>(mu[static_cast<std::size_t>(b)]) * chiv[static_cast<std::size_t>(b)];
        for (std::int64_t c = 1; c <= V; ++c) {
            if (mu[static_cast<std::size_t>(c)] == 0) continue;
            t1.coeff_a[static_cast<std::size_t>(b * c)] +=
                mb * static_cast<double>(mu[static_cast<std::size_t>(c)]) * chiv[static_cast<std::size_t>(c)];
        }
    }
    for (std::int64_t d = 1; d <= V * V && d <= N; ++d) {
        double ad = t1.coeff_a[static_cast<std::size_t>(d)];
        if (ad == 0.0) continue;
        for (std::int64_t m = 1; d * m <= N; ++m)
            t1.value.values[d * m - 1] -= ad * chiv[static_cast<std::size_t>(m)];
    }

    DecompComponent t2;
    t2.kind = ComponentKind::type_ii;
    t2.value = zero_interval(N, "type_ii");
    std::int64_t wmax = N / (V + 1);
    t2.coeff_b.assign(static_cast<std::size_t>(wmax) + 1, 0.0);
    for (std::int64_t c = V + 1; c <= wmax; ++c) {
        if (mu[static_cast<std::size_t>(c)] == 0) continue;
        double mc = static_cast<double>(mu[static_cast<std::size_t>(c)]) * chiv[static_cast<std::size_t>(c)];
        for (std::int64_t j = 1; c * j <= wmax; ++j)
            t2.coeff_b[static_cast<std::size_t>(c * j)] += mc * chiv[static_cast<std::size_t>(j)];
    }
    for (std::int64_t u = V + 1; u <= N; ++u) {
        if (mu[static_cast<std::size_t>(u)] == 0) continue;
        double muu = static_cast<double>(mu[static_cast<std::size_t>(u)]) * chiv[static_cast<std::size_t>(u)];
        if (muu == 0.0) continue;
        for (std::int64_t w = 1; u * w <= N; ++w)
            t2.value.values[u * w - 1] += muu * t2.coeff_b[static_cast<std::size_t>(w)];
    }

    dec.components = {std::move(neg), std::move(t1), std::move(t2)};
    return dec;
}

ArithSignal dirichlet_convolve(const ArithSignal& f, const ArithSignal& g) {
    if (f.domain != Domain::interval || g.domain != Domain::interval)
        throw std::invalid_argument("dirichlet_convolve: both signals must live on an interval");
    if (f.length() != g.length())
        throw std::invalid_argument("dirichlet_convolve: signals must share one interval length");
    std::int64_t N = f.length();
    ArithSignal out = zero_interval(N, "convolution");
    out.real_valued = f.real_valued && g.real_valued;
    for (std::int64_t d = 1; d <= N; ++d) {
        std::complex<double> fd = f.values[d - 1];
        if (fd == std::complex<double>(0.0, 0.0)) continue;
        for (std::int64_t m = 1; d * m <= N; ++m) out.values[d * m - 1] += fd * g.values[m - 1];
    }
    return out;
}

double verify_decomposition(const VaughanDecomposition& dec) {
    Eigen::ArrayXcd sum = Eigen::ArrayXcd::Zero(dec.target_signal.length());
    for (const DecompComponent& c : dec.components) sum += c.value.values;
    return (dec.target_signal.values - sum).abs().maxCoeff();
}

void write_decomposition_csv(const VaughanDecomposition& dec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_decomposition_csv: cannot open '" + path + "'");
    out << "kind,index,re,im\n";
    char buf[112];
    for (const DecompComponent& c : dec.components) {
        const char* kind = component_kind_name(c.kind);
        for (std::int64_t j = 0; j < c.value.length(); ++j) {
            std::snprintf(buf, sizeof(buf), "%s,%lld,%.17g,%.17g\n", kind,
                          static_cast<long long>(c.value.point(j)), c.value.values[j].real(),
                          c.value.values[j].imag());
            out << buf;
        }
    }
    if (!out) throw std::invalid_argument("write_decomposition_csv: write failed for '" + path + "'");
}

} // namespace gowerslab
