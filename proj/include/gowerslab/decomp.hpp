#pragma once

#include "gowerslab/models.hpp"
#include "gowerslab/signal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gowerslab {

enum class ComponentKind { type_i, twisted_type_i, type_ii, negligible };

const char* component_kind_name(ComponentKind k);

// One summand of the identity: its pointwise values on [N] plus the
// coefficient table it was swept from (a_d for Type I, b_w for Type II).
struct DecompComponent {
    ComponentKind kind = ComponentKind::type_i;
    ArithSignal value;
    std::vector<double> coeff_a;
    std::vector<double> coeff_b;
};

struct VaughanDecomposition {
    enum class Target { lambda, mu };
    std::int64_t N = 0;
    Target target = Target::lambda;
    double cut1 = 0.0; // N^{1/3}
    double cut2 = 0.0; // N^{2/3}
    ArithSignal target_signal;
    std::vector<DecompComponent> components;
};

// Exact identity with V = floor(N^{1/3}):
//   Lambda(n) = Lambda(n) 1_{n<=V}                       (negligible)
//             + sum_{d|n, d<=V} mu(d) log(n/d)           (Type I, log weight)
//             - sum_{d|n} a_d,  a_d = sum_{bc=d: b,c<=V} mu(b) Lambda(c)
//             + sum_{uw=n, u>V} Lambda(u) b_w,  b_w = sum_{c|w: c>V} mu(c)
// A supplied twist chi multiplies every convolution factor, so the result
// decomposes Lambda*chi and the Type I pieces become twisted Type I.
VaughanDecomposition vaughan_lambda(std::int64_t N, const SiegelConfig* twist = nullptr);

// Exact identity with the same cuts:
//   mu(n) = 2 mu(n) 1_{n<=V}                             (negligible)
//         - sum_{d|n} a'_d,  a'_d = sum_{bc=d: b,c<=V} mu(b) mu(c)
//         + sum_{uw=n, u>V} mu(u) b_w
VaughanDecomposition vaughan_mu(std::int64_t N, const SiegelConfig* twist = nullptr);

// (f*g)(n) = sum_{d|n} f(d) g(n/d) over the shared interval domain,
// by the divisor-pair sweep in O(N log N)
ArithSignal dirichlet_convolve(const ArithSignal& f, const ArithSignal& g);

// max_{n<=N} |target(n) - sum of components(n)|
double verify_decomposition(const VaughanDecomposition& dec);

// Component-wise signal rows with a leading kind column: kind,index,re,im
void write_decomposition_csv(const VaughanDecomposition& dec, const std::string& path);

} // namespace gowerslab
