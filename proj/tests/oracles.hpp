// oracles.hpp
// Slow, obviously-correct reference implementations used only by tests.
// Nothing here calls into the library.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

inline std::map<std::uint64_t, unsigned> factor(std::uint64_t n)
{
    std::map<std::uint64_t, unsigned> f;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        while (n % p == 0) {
            ++f[p];
            n /= p;
        }
    if (n > 1)
        ++f[n];
    return f;
}

inline bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

inline int mobius(std::uint64_t n)
{
    int s = 1;
    for (const auto& [p, e] : factor(n)) {
        if (e > 1)
            return 0;
        s = -s;
    }
    return s;
}

inline int kfree(std::uint64_t n, unsigned k)
{
    for (const auto& [p, e] : factor(n))
        if (e >= k)
            return 0;
    return 1;
}

// Count of k-free n <= N by marking every multiple of p^k.
inline std::uint64_t kfree_count_by_marking(std::uint64_t n, unsigned k)
{
    std::vector<char> bad(n + 1, 0);
    for (std::uint64_t p = 2;; ++p) {
        std::uint64_t pk = 1;
        bool over = false;
        for (unsigned i = 0; i < k; ++i) {
            if (pk > n / p) {
                over = true;
                break;
            }
            pk *= p;
        }
        if (over)
            break;
        if (!is_prime(p))
            continue;
        for (std::uint64_t m = pk; m <= n; m += pk)
            bad[m] = 1;
    }
    std::uint64_t c = 0;
    for (std::uint64_t m = 1; m <= n; ++m)
        c += bad[m] ? 0 : 1;
    return c;
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m)
{
    unsigned __int128 r = 1, x = b % m;
    while (e) {
        if (e & 1)
            r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<std::uint64_t>(r);
}

// Legendre symbol (a|p) by Euler's criterion, p an odd prime.
inline int legendre_euler(std::uint64_t a, std::uint64_t p)
{
    a %= p;
    if (a == 0)
        return 0;
    return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

// Real character mod 4 and mod 8 (d = 8) from their defining tables.
inline int chi4(std::uint64_t n)
{
    return n % 2 == 0 ? 0 : (n % 4 == 1 ? 1 : -1);
}

// Any real character given by its values on primes, extended completely
// multiplicatively by trial division.
template <typename PrimeValue>
int completely_multiplicative(std::uint64_t n, PrimeValue at_prime)
{
    int v = 1;
    for (const auto& [p, e] : factor(n))
        for (unsigned i = 0; i < e; ++i)
            v *= at_prime(p);
    return v;
}

// (a * b)(n) by direct divisor enumeration, a and b indexed from 1.
inline std::vector<long long> convolve(const std::vector<long long>& a, const std::vector<long long>& b)
{
    const std::size_t n = a.size() - 1;
    std::vector<long long> c(n + 1, 0);
    for (std::size_t m = 1; m <= n; ++m)
        for (std::size_t d = 1; d * d <= m; ++d)
            if (m % d == 0) {
                c[m] += a[d] * b[m / d];
                if (d * d != m)
                    c[m] += a[m / d] * b[d];
            }
    return c;
}

inline long long prefix_sum(const std::vector<long long>& a, std::uint64_t x)
{
    long long s = 0;
    for (std::uint64_t n = 1; n <= x && n < a.size(); ++n)
        s += a[n];
    return s;
}

} // namespace oracle
