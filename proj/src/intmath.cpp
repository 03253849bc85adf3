#include "kfree/intmath.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

namespace kfree {

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && (r > UINT32_MAX || r * r > n))
        --r;
    while (r + 1 <= UINT32_MAX && (r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned exp, std::uint64_t cap)
{
    std::uint64_t result = 1;
    for (unsigned i = 0; i < exp; ++i) {
        unsigned __int128 next = static_cast<unsigned __int128>(result) * base;
        if (next > cap)
            return std::nullopt;
        result = static_cast<std::uint64_t>(next);
    }
    return result;
}

std::uint64_t iroot(std::uint64_t n, unsigned k)
{
    if (k == 0)
        throw std::invalid_argument("iroot: k must be >= 1");
    if (k == 1 || n < 2)
        return n;
    if (k == 2)
        return isqrt(n);
    // binary search on [1, 2^(64/k)+1]
    std::uint64_t lo = 1;
    std::uint64_t hi = (k >= 64) ? 2 : (std::uint64_t{1} << (64 / k + 1));
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo + 1) / 2;
        if (checked_pow(mid, k, n))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

std::optional<std::uint64_t> exact_root(std::uint64_t n, unsigned k)
{
    std::uint64_t m = iroot(n, k);
    auto back = checked_pow(m, k);
    if (back && *back == n)
        return m;
    return std::nullopt;
}

std::uint64_t floor_rational_power(std::uint64_t x, unsigned num, unsigned den)
{
    using boost::multiprecision::cpp_int;
    if (den == 0)
        throw std::invalid_argument("floor_rational_power: zero denominator");
    if (x <= 1 || num == 0)
        return num == 0 ? 1 : x;

    const cpp_int target = boost::multiprecision::pow(cpp_int(x), num);
    auto fits = [&](std::uint64_t u) {
        return boost::multiprecision::pow(cpp_int(u), den) <= target;
    };

    long double est = std::pow(static_cast<long double>(x),
                               static_cast<long double>(num) / static_cast<long double>(den));
    std::uint64_t u = est >= 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(est);
    if (u == 0)
        u = 1;
    while (u > 1 && !fits(u))
        --u;
    while (u < UINT64_MAX && fits(u + 1))
        ++u;
    return u;
}

unsigned omega(std::uint64_t n)
{
    unsigned count = 0;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            ++count;
            while (n % p == 0)
                n /= p;
        }
    }
    if (n > 1)
        ++count;
    return count;
}

bool is_prime_trial(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

} // namespace kfree
