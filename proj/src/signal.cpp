#include "gowerslab/signal.hpp"

#include "gowerslab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gowerslab {

namespace {

constexpr char k_magic[4] = {'G', 'W', 'S', 'B'};

std::complex<double> unit_phase(double x) {
    // e(x) = exp(2 pi i x)
    double arg = 2.0 * std::numbers::pi * x;
    return {std::cos(arg), std::sin(arg)};
}

std::int64_t expected_length(Domain domain, std::int64_t size_param, std::int64_t a, std::int64_t d) {
    switch (domain) {
        case Domain::cyclic: return size_param;
        case Domain::interval: return size_param;
        case Domain::coset: {
            if (d < 1) throw std::invalid_argument("ArithSignal: coset step must be >= 1");
            // points a + d*j inside [1, N]
            if (a > size_param) return 0;
            std::int64_t first = a >= 1 ? a : a + ((1 - a + d - 1) / d) * d;
            if (first > size_param) return 0;
            return (size_param - first) / d + 1;
        }
    }
    return 0;
}

} // namespace

void ArithSignal::validate() const {
    if (size_param < 1) throw std::invalid_argument("ArithSignal: empty domain");
    std::int64_t want = expected_length(domain, size_param, coset_a, coset_d);
    if (values.size() != want)
        throw std::invalid_argument("ArithSignal: value length " + std::to_string(values.size()) +
                                    " does not match domain size " + std::to_string(want));
    if (!values.allFinite()) throw std::invalid_argument("ArithSignal: values must be finite");
    if (real_valued) {
        for (std::int64_t i = 0; i < values.size(); ++i)
            if (values[i].imag() != 0.0)
                throw std::invalid_argument("ArithSignal: real_valued flag set but imaginary part present");
    }
}

ArithSignal make_cyclic_signal(std::int64_t M, Eigen::ArrayXcd values, std::string label) {
    ArithSignal f;
    f.domain = Domain::cyclic;
    f.size_param = M;
    f.values = std::move(values);
    f.label = std::move(label);
    f.validate();
    return f;
}

ArithSignal make_interval_signal(std::int64_t N, Eigen::ArrayXcd values, std::string label) {
    ArithSignal f;
    f.domain = Domain::interval;
    f.size_param = N;
    f.values = std::move(values);
    f.label = std::move(label);
    f.validate();
    return f;
}

ArithSignal make_coset_signal(std::int64_t N, std::int64_t a, std::int64_t d, Eigen::ArrayXcd values,
                              std::string label) {
    ArithSignal f;
    f.domain = Domain::coset;
    f.size_param = N;
    // normalize the representative to the first point inside [1, N]
    f.coset_a = (d >= 1 && a < 1) ? a + ((1 - a + d - 1) / d) * d : a;
    f.coset_d = d;
    f.values = std::move(values);
    f.label = std::move(label);
    f.validate();
    return f;
}

ArithSignal ones_signal(Domain domain, std::int64_t size) {
    Eigen::ArrayXcd v = Eigen::ArrayXcd::Ones(size);
    if (domain == Domain::cyclic) return make_cyclic_signal(size, std::move(v), "one");
    return make_interval_signal(size, std::move(v), "one");
}

ArithSignal mu_signal(const FactorTable& t, std::int64_t N) {
    if (N < 1) throw std::invalid_argument("mu_signal: N must be >= 1");
    Eigen::ArrayXcd v(N);
    for (std::int64_t n = 1; n <= N; ++n) v[n - 1] = static_cast<double>(moebius(t, n));
    auto f = make_interval_signal(N, std::move(v), "mu");
    f.real_valued = true;
    return f;
}

ArithSignal lambda_signal(const FactorTable& t, std::int64_t N, bool primes_only) {
    if (N < 1) throw std::invalid_argument("lambda_signal: N must be >= 1");
    Eigen::ArrayXcd v(N);
    for (std::int64_t n = 1; n <= N; ++n) {
        double lam = von_mangoldt(t, n);
        if (primes_only && lam != 0.0 && !t.is_prime(static_cast<std::uint64_t>(n))) lam = 0.0;
        v[n - 1] = lam;
    }
    auto f = make_interval_signal(N, std::move(v), primes_only ? "lambda_prime" : "lambda");
    f.real_valued = true;
    return f;
}

ArithSignal modulate(const ArithSignal& f, double theta) {
    ArithSignal g = f;
    for (std::int64_t j = 0; j < g.length(); ++j)
        g.values[j] = f.values[j] * unit_phase(theta * static_cast<double>(f.point(j)));
    g.real_valued = false;
    if (!g.label.empty()) g.label += "*e(theta n)";
    return g;
}

std::complex<double> exponential_sum(const ArithSignal& f, std::int64_t a, std::int64_t q,
                                     std::int64_t range_lo, std::int64_t range_hi, double theta) {
    if (q < 1) throw std::invalid_argument("exponential_sum: progression step must be >= 1");
    std::int64_t dom_lo, dom_hi;
    switch (f.domain) {
        case Domain::cyclic:
            dom_lo = 0;
            dom_hi = f.size_param - 1;
            break;
        case Domain::interval:
            dom_lo = 1;
            dom_hi = f.size_param;
            break;
        default:
            throw std::invalid_argument("exponential_sum: coset signals not supported here");
    }
    std::int64_t lo = std::max(range_lo, dom_lo);
    std::int64_t hi = std::min(range_hi, dom_hi);
    if (range_lo < dom_lo || range_hi > dom_hi)
        throw std::invalid_argument("exponential_sum: progression range leaves the signal domain");
    std::complex<double> acc{0.0, 0.0};
    // first progression point >= lo
    std::int64_t n = a;
    if (n < lo) n += ((lo - n + q - 1) / q) * q;
    for (; n <= hi; n += q) {
        std::int64_t idx = f.domain == Domain::cyclic ? n : n - 1;
        acc += f.values[idx] * unit_phase(theta * static_cast<double>(n));
    }
    return acc;
}

void write_signal_csv(const ArithSignal& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_signal_csv: cannot open '" + path + "'");
    out << "index,re,im\n";
    char buf[96];
    for (std::int64_t j = 0; j < f.length(); ++j) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                      static_cast<long long>(f.point(j)), f.values[j].real(), f.values[j].imag());
        out << buf;
    }
}

ArithSignal read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("read_signal_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("index", 0) != 0)
        throw std::invalid_argument("read_signal_csv: missing header");
    std::vector<std::int64_t> idx;
    std::vector<std::complex<double>> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long long i;
        double re, im;
        if (std::sscanf(line.c_str(), "%lld,%lf,%lf", &i, &re, &im) != 3)
            throw std::invalid_argument("read_signal_csv: malformed row '" + line + "'");
        idx.push_back(i);
        vals.emplace_back(re, im);
    }
    if (idx.empty()) throw std::invalid_argument("read_signal_csv: no data rows");
    Eigen::ArrayXcd v(static_cast<std::int64_t>(vals.size()));
    for (std::size_t j = 0; j < vals.size(); ++j) v[static_cast<std::int64_t>(j)] = vals[j];
    // infer domain: indices starting at 0 -> cyclic, at 1 with step 1 -> interval, else coset
    if (idx.front() == 0) return make_cyclic_signal(static_cast<std::int64_t>(idx.size()), std::move(v));
    std::int64_t step = idx.size() > 1 ? idx[1] - idx[0] : 1;
    if (idx.front() == 1 && step == 1)
        return make_interval_signal(static_cast<std::int64_t>(idx.size()), std::move(v));
    return make_coset_signal(idx.back(), idx.front(), step, std::move(v));
}

void write_signal_binary(const ArithSignal& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("write_signal_binary: cannot open '" + path + "'");
    out.write(k_magic, 4);
    std::uint8_t tag = static_cast<std::uint8_t>(f.domain);
    std::uint8_t realflag = f.real_valued ? 1 : 0;
    std::int64_t meta[3] = {f.size_param, f.coset_a, f.coset_d};
    std::uint64_t len = static_cast<std::uint64_t>(f.length());
    out.write(reinterpret_cast<const char*>(&tag), 1);
    out.write(reinterpret_cast<const char*>(&realflag), 1);
    out.write(reinterpret_cast<const char*>(meta), sizeof meta);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    // x86-64 doubles are little-endian, written raw
    for (std::int64_t j = 0; j < f.length(); ++j) {
        double re = f.values[j].real(), im = f.values[j].imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

ArithSignal read_signal_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("read_signal_binary: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, k_magic, 4) != 0)
        throw std::invalid_argument("read_signal_binary: bad magic");
    std::uint8_t tag, realflag;
    std::int64_t meta[3];
    std::uint64_t len;
    in.read(reinterpret_cast<char*>(&tag), 1);
    in.read(reinterpret_cast<char*>(&realflag), 1);
    in.read(reinterpret_cast<char*>(meta), sizeof meta);
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || tag > 2) throw std::invalid_argument("read_signal_binary: bad header");
    Eigen::ArrayXcd v(static_cast<std::int64_t>(len));
    for (std::uint64_t j = 0; j < len; ++j) {
        double re, im;
        in.read(reinterpret_cast<char*>(&re), sizeof re);
        in.read(reinterpret_cast<char*>(&im), sizeof im);
        if (!in) throw std::invalid_argument("read_signal_binary: truncated data");
        v[static_cast<std::int64_t>(j)] = {re, im};
    }
    ArithSignal f;
    f.domain = static_cast<Domain>(tag);
    f.size_param = meta[0];
    f.coset_a = meta[1];
    f.coset_d = meta[2];
    f.real_valued = realflag != 0;
    f.values = std::move(v);
    f.validate();
    return f;
}

} // namespace gowerslab
