// characters.hpp
// Real Dirichlet characters realised as Kronecker symbols (d|n) of a
// fundamental discriminant d, with a period table of length |d| = q.

#pragma once

#include "kfree/sieve.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kfree {

// Kronecker symbol (d|n) for n >= 0.
int kronecker_symbol(std::int64_t d, std::uint64_t n);

// True if d is a fundamental discriminant (d = 1 mod 4 squarefree, or
// d = 4m with m = 2,3 mod 4 squarefree). d = 1 is excluded.
bool is_fundamental_discriminant(std::int64_t d);

class RealCharacter {
public:
    std::uint64_t modulus() const noexcept { return modulus_; }
    std::int64_t discriminant() const noexcept { return discriminant_; }
    bool principal() const noexcept { return false; }
    // "chi_q", the run-config name.
    std::string name() const { return "chi_" + std::to_string(modulus_); }

    // chi(n) by period lookup; chi(0) = 0.
    int operator()(std::uint64_t n) const noexcept { return period_[n % modulus_]; }

    // period_values()[r] = chi(r) for r in [0, q); index 0 is chi(q) = 0.
    const std::vector<std::int8_t>& period_values() const noexcept { return period_; }

    // max over y >= 1 of |sum_{n<=y} chi(n)|; attained within one period.
    std::int64_t max_abs_partial_sum() const;

private:
    friend RealCharacter build_character_from_discriminant(std::int64_t d);
    RealCharacter(std::uint64_t q, std::int64_t d, std::vector<std::int8_t> period)
        : modulus_(q), discriminant_(d), period_(std::move(period))
    {}

    std::uint64_t modulus_;
    std::int64_t discriminant_;
    std::vector<std::int8_t> period_;
};

// The primitive real character (d|.) of conductor |d|. Throws
// ConstructionError unless d is a fundamental discriminant.
RealCharacter build_character_from_discriminant(std::int64_t d);

// The primitive real non-principal character of modulus q. When both +q and
// -q are fundamental (8 | q) the positive discriminant is used. Throws
// ConstructionError naming q when no such character exists.
RealCharacter build_real_character(std::uint64_t q);

// Parses "chi_5" (or a bare "5") into a modulus.
std::uint64_t parse_character_name(const std::string& name);

DenseValueTable character_table(const RealCharacter& chi, std::uint64_t lo, std::uint64_t hi);

} // namespace kfree
