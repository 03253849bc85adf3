// sieve.hpp
// Segmented sieves producing exact arithmetic-function tables: primes,
// smallest prime factors, the Moebius function and k-free indicators.
//
// All tables are plain values; once built they are immutable and can be
// shared read-only across threads. Segmented output is bit-identical to a
// one-shot sieve of the same range.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kfree {

// Largest admissible integer argument (2^63 - 1).
inline constexpr std::uint64_t kMaxArgument = static_cast<std::uint64_t>(INT64_MAX);
// Base primes are sieved up to this bound at most, so segment ranges top out
// at kMaxBasePrime^2 = 10^16.
inline constexpr std::uint64_t kMaxBasePrime = 100'000'000;
// Largest dense table (entries) any single call will materialise.
inline constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 31;
inline constexpr std::uint64_t kMaxSpfLimit = 100'000'000;
inline constexpr std::size_t kDefaultSegmentSize = std::size_t{1} << 20;
inline constexpr unsigned kMaxK = 60;

// Values of an arithmetic function f(n) for n in [lo, hi].
struct DenseValueTable {
    std::uint64_t lo = 1;
    std::uint64_t hi = 0;
    std::vector<std::int8_t> values;  // values[n - lo]
    std::string label;

    std::size_t size() const noexcept { return values.size(); }
    bool contains(std::uint64_t n) const noexcept { return n >= lo && n <= hi; }
    std::int8_t operator()(std::uint64_t n) const noexcept { return values[n - lo]; }
    // Throws RangeError outside [lo, hi].
    std::int8_t at(std::uint64_t n) const;
    // True when every entry lies in [min_value, max_value].
    bool within(int min_value, int max_value) const noexcept;
};

bool operator==(const DenseValueTable& a, const DenseValueTable& b);

// Smallest-prime-factor table on [0, limit]; spf(1) = 1.
class SpfTable {
public:
    SpfTable() = default;
    explicit SpfTable(std::uint64_t limit);

    std::uint64_t limit() const noexcept { return limit_; }
    std::uint64_t operator()(std::uint64_t n) const noexcept { return spf_[n]; }
    std::uint64_t at(std::uint64_t n) const;

    // Prime factorisation of n as (p, e) pairs, ascending p.
    std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) const;

private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
};

// All primes <= n in ascending order. n < 2 gives an empty list.
std::vector<std::uint64_t> sieve_primes(std::uint64_t n);

SpfTable build_spf(std::uint64_t n);

// mu(n) for n in [lo, hi]. Base primes must cover sqrt(hi); the overload
// without them sieves its own.
DenseValueTable sieve_mobius_segment(std::uint64_t lo, std::uint64_t hi);
DenseValueTable sieve_mobius_segment(std::uint64_t lo, std::uint64_t hi,
                                     std::span<const std::uint64_t> base_primes);

// mu_k^2(n): 1 when no p^k divides n, else 0. Requires 2 <= k <= 60.
DenseValueTable sieve_kfree_segment(std::uint64_t lo, std::uint64_t hi, unsigned k);
DenseValueTable sieve_kfree_segment(std::uint64_t lo, std::uint64_t hi, unsigned k,
                                    std::span<const std::uint64_t> base_primes);

// Validates 1 <= lo <= hi <= 2^63-1 and the table-size budget.
void check_segment_range(std::uint64_t lo, std::uint64_t hi);
void check_k(unsigned k);

// Base primes needed to sieve segments up to hi (primes <= sqrt(hi)).
std::vector<std::uint64_t> base_primes_for(std::uint64_t hi);

// CSV dump: header "n,value", one row per entry.
void write_table_csv(const DenseValueTable& table, std::ostream& out);

} // namespace kfree
