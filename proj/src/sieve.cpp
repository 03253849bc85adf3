#include "kfree/sieve.hpp"

#include "kfree/errors.hpp"
#include "kfree/intmath.hpp"

#include <algorithm>
#include <ostream>

namespace kfree {

namespace {

constexpr std::uint64_t kMaxPrimeList = std::uint64_t{1} << 32;

std::uint64_t first_multiple(std::uint64_t p, std::uint64_t lo)
{
    return ((lo + p - 1) / p) * p;
}

} // namespace

std::int8_t DenseValueTable::at(std::uint64_t n) const
{
    if (!contains(n))
        throw RangeError(label + ": n=" + std::to_string(n) + " outside [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return values[n - lo];
}

bool DenseValueTable::within(int min_value, int max_value) const noexcept
{
    return std::all_of(values.begin(), values.end(),
                       [&](std::int8_t v) { return v >= min_value && v <= max_value; });
}

bool operator==(const DenseValueTable& a, const DenseValueTable& b)
{
    return a.lo == b.lo && a.hi == b.hi && a.values == b.values;
}

void check_segment_range(std::uint64_t lo, std::uint64_t hi)
{
    if (hi > kMaxArgument)
        throw RangeError("upper bound " + std::to_string(hi) + " exceeds 2^63-1");
    if (lo < 1 || lo > hi)
        throw RangeError("invalid range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (hi - lo + 1 > kMaxTableEntries)
        throw CapacityError("range of " + std::to_string(hi - lo + 1) +
                            " entries exceeds the table budget");
}

void check_k(unsigned k)
{
    if (k < 2 || k > kMaxK)
        throw RangeError("k must satisfy 2 <= k <= 60, got " + std::to_string(k));
}

std::vector<std::uint64_t> sieve_primes(std::uint64_t n)
{
    if (n < 2)
        return {};
    if (n > kMaxPrimeList)
        throw CapacityError("sieve_primes: limit " + std::to_string(n) + " exceeds budget");

    const std::uint64_t root = isqrt(n);
    std::vector<char> small(root + 1, 1);
    std::vector<std::uint64_t> small_primes;
    for (std::uint64_t i = 2; i <= root; ++i) {
        if (!small[i])
            continue;
        small_primes.push_back(i);
        for (std::uint64_t j = i * i; j <= root; j += i)
            small[j] = 0;
    }

    std::vector<std::uint64_t> primes;
    std::vector<char> seg;
    for (std::uint64_t lo = 2; lo <= n; lo += kDefaultSegmentSize) {
        const std::uint64_t hi = std::min(n, lo + kDefaultSegmentSize - 1);
        seg.assign(hi - lo + 1, 1);
        for (std::uint64_t p : small_primes) {
            if (p * p > hi)
                break;
            for (std::uint64_t m = std::max(p * p, first_multiple(p, lo)); m <= hi; m += p)
                seg[m - lo] = 0;
        }
        for (std::uint64_t i = 0; i < seg.size(); ++i)
            if (seg[i])
                primes.push_back(lo + i);
    }
    return primes;
}

SpfTable::SpfTable(std::uint64_t limit) : limit_(limit)
{
    if (limit > kMaxSpfLimit)
        throw CapacityError("smallest-prime-factor table of size " + std::to_string(limit) +
                            " exceeds the memory budget");
    spf_.assign(limit + 1, 0);
    if (limit >= 1)
        spf_[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] != 0)
            continue;
        spf_[i] = static_cast<std::uint32_t>(i);
        if (i * i > limit)
            continue;
        for (std::uint64_t j = i * i; j <= limit; j += i)
            if (spf_[j] == 0)
                spf_[j] = static_cast<std::uint32_t>(i);
    }
}

std::uint64_t SpfTable::at(std::uint64_t n) const
{
    if (n < 1 || n > limit_)
        throw RangeError("spf: n=" + std::to_string(n) + " outside [1, " + std::to_string(limit_) + "]");
    return spf_[n];
}

std::vector<std::pair<std::uint64_t, unsigned>> SpfTable::factorize(std::uint64_t n) const
{
    at(n);
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    while (n > 1) {
        const std::uint64_t p = spf_[n];
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    return out;
}

SpfTable build_spf(std::uint64_t n)
{
    return SpfTable(n);
}

std::vector<std::uint64_t> base_primes_for(std::uint64_t hi)
{
    const std::uint64_t root = isqrt(hi);
    if (root > kMaxBasePrime)
        throw CapacityError("range up to " + std::to_string(hi) +
                            " needs base primes beyond the configured budget");
    return sieve_primes(root);
}

DenseValueTable sieve_mobius_segment(std::uint64_t lo, std::uint64_t hi)
{
    check_segment_range(lo, hi);
    const auto primes = base_primes_for(hi);
    return sieve_mobius_segment(lo, hi, primes);
}

DenseValueTable sieve_mobius_segment(std::uint64_t lo, std::uint64_t hi,
                                     std::span<const std::uint64_t> base_primes)
{
    check_segment_range(lo, hi);
    const std::size_t len = hi - lo + 1;
    DenseValueTable table{lo, hi, std::vector<std::int8_t>(len, 1), "mu"};
    std::vector<std::uint64_t> prod(len, 1);

    for (std::uint64_t p : base_primes) {
        if (p > hi / p)
            break;
        for (std::uint64_t m = first_multiple(p, lo); m <= hi; m += p) {
            table.values[m - lo] = static_cast<std::int8_t>(-table.values[m - lo]);
            prod[m - lo] *= p;
        }
        const std::uint64_t p2 = p * p;
        for (std::uint64_t m = first_multiple(p2, lo); m <= hi; m += p2)
            table.values[m - lo] = 0;
    }
    // At most one prime factor above sqrt(hi) remains unaccounted for.
    for (std::size_t i = 0; i < len; ++i)
        if (prod[i] != lo + i)
            table.values[i] = static_cast<std::int8_t>(-table.values[i]);
    return table;
}

DenseValueTable sieve_kfree_segment(std::uint64_t lo, std::uint64_t hi, unsigned k)
{
    check_segment_range(lo, hi);
    check_k(k);
    const auto primes = sieve_primes(iroot(hi, k));
    return sieve_kfree_segment(lo, hi, k, primes);
}

DenseValueTable sieve_kfree_segment(std::uint64_t lo, std::uint64_t hi, unsigned k,
                                    std::span<const std::uint64_t> base_primes)
{
    check_segment_range(lo, hi);
    check_k(k);
    DenseValueTable table{lo, hi, std::vector<std::int8_t>(hi - lo + 1, 1),
                          "mu_" + std::to_string(k) + "^2"};
    for (std::uint64_t p : base_primes) {
        const auto pk = checked_pow(p, k, hi);
        if (!pk)
            break;
        for (std::uint64_t m = first_multiple(*pk, lo); m <= hi; m += *pk)
            table.values[m - lo] = 0;
    }
    return table;
}

void write_table_csv(const DenseValueTable& table, std::ostream& out)
{
    out << "n,value\n";
    for (std::uint64_t n = table.lo; n <= table.hi; ++n)
        out << n << ',' << static_cast<int>(table(n)) << '\n';
}

} // namespace kfree
