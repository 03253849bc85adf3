// intmath.hpp
// Exact integer helpers: square roots, k-th roots, overflow-checked powers.
// Roots are computed by correction from a floating estimate or by binary
// search, always verified exactly; floating roots alone misclassify
// near-powers such as (2^21+1)^3 - 1.

#pragma once

#include <cstdint>
#include <optional>

namespace kfree {

// floor(sqrt(n))
std::uint64_t isqrt(std::uint64_t n);

// floor(n^(1/k)) for k >= 1.
std::uint64_t iroot(std::uint64_t n, unsigned k);

// base^exp, or nullopt when the result exceeds `cap` (default: 2^64-1).
std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned exp,
                                         std::uint64_t cap = UINT64_MAX);

// n if n = m^k for some integer m, returns m; otherwise nullopt.
std::optional<std::uint64_t> exact_root(std::uint64_t n, unsigned k);

// Largest u with u^den <= x^num (i.e. floor(x^(num/den))), exact.
std::uint64_t floor_rational_power(std::uint64_t x, unsigned num, unsigned den);

// Number of distinct prime factors, by trial division (small inputs only).
unsigned omega(std::uint64_t n);

bool is_prime_trial(std::uint64_t n);

} // namespace kfree
