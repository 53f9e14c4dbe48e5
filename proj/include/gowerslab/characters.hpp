#pragma once

#include <cstdint>
#include <vector>

namespace gowerslab {

// Kronecker symbol (a|n), defined for all integers.
int kronecker_symbol(std::int64_t a, std::int64_t n);

// Real primitive character of conductor q, evaluated through the Kronecker
// symbol of its fundamental discriminant. Immutable and shareable.
struct DirichletCharacter {
    std::int64_t q = 1; // conductor
    std::int64_t D = 1; // discriminant, |D| = q
    bool trivial = true;

    int operator()(std::int64_t n) const;

    // dense period table chi(0..q-1)
    std::vector<std::int8_t> period_table() const;
};

// Accepts q = 1 (trivial), odd squarefree q, 4*(odd squarefree), or
// 8*(squarefree); anything else throws conductor_error naming the failing
// condition.
DirichletCharacter make_real_character(std::int64_t q);

// Normalized degree-k uniformity norm of chi over Z/qZ, evaluated exactly in
// integer arithmetic (correlation sums are integers). Work grows like q^k;
// past the budget a resource error points at the k=2 spectral route.
double char_gowers_norm(const DirichletCharacter& chi, int k,
                        std::uint64_t budget = 4000000000ull);

} // namespace gowerslab
