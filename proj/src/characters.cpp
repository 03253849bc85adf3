#include "kfree/characters.hpp"

#include "kfree/errors.hpp"

#include <cstdlib>
#include <numeric>
#include <utility>

namespace kfree {

namespace {

// (a|2) for odd a, indexed by a mod 8.
constexpr int kTwoTable[8] = {0, 1, 0, -1, 0, -1, 0, 1};

bool squarefree(std::uint64_t m)
{
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % (p * p) == 0)
            return false;
        if (m % p == 0)
            m /= p;
    }
    return true;
}

// Jacobi symbol (a|b) for odd b > 0, 0 <= a < b.
int jacobi(std::uint64_t a, std::uint64_t b)
{
    int sign = 1;
    while (a != 0) {
        unsigned v = static_cast<unsigned>(__builtin_ctzll(a));
        a >>= v;
        if ((v & 1U) && kTwoTable[b & 7] == -1)
            sign = -sign;
        if (a & b & 2)
            sign = -sign;
        std::uint64_t r = b % a;
        b = a;
        a = r;
    }
    return b == 1 ? sign : 0;
}

} // namespace

int kronecker_symbol(std::int64_t d, std::uint64_t n)
{
    if (n == 0)
        return (d == 1 || d == -1) ? 1 : 0;
    const auto d_mod8 = static_cast<std::uint64_t>(d) & 7;  // two's complement: d mod 8
    if ((n & 1) == 0 && (d_mod8 & 1) == 0)
        return 0;

    int sign = 1;
    unsigned v = static_cast<unsigned>(__builtin_ctzll(n));
    n >>= v;
    if ((v & 1U) && kTwoTable[d_mod8] == -1)
        sign = -sign;

    // n odd positive: (d|n) is the Jacobi symbol, periodic in d mod n.
    std::int64_t r = static_cast<std::int64_t>(
        static_cast<__int128>(d) % static_cast<__int128>(n));
    if (r < 0)
        r += static_cast<std::int64_t>(n);
    return sign * jacobi(static_cast<std::uint64_t>(r), n);
}

bool is_fundamental_discriminant(std::int64_t d)
{
    if (d == 0 || d == 1)
        return false;
    const std::uint64_t a = static_cast<std::uint64_t>(d < 0 ? -d : d);
    const std::int64_t m4 = ((d % 4) + 4) % 4;
    if (m4 == 1)
        return squarefree(a);
    if (m4 != 0)
        return false;
    const std::int64_t m = d / 4;
    const std::int64_t mm4 = ((m % 4) + 4) % 4;
    return (mm4 == 2 || mm4 == 3) && squarefree(a / 4);
}

std::int64_t RealCharacter::max_abs_partial_sum() const
{
    std::int64_t sum = 0;
    std::int64_t best = 0;
    for (std::uint64_t n = 1; n <= modulus_; ++n) {
        sum += (*this)(n);
        best = std::max(best, std::abs(sum));
    }
    return best;
}

RealCharacter build_character_from_discriminant(std::int64_t d)
{
    if (!is_fundamental_discriminant(d))
        throw ConstructionError("discriminant " + std::to_string(d) + " is not fundamental");
    const std::uint64_t q = static_cast<std::uint64_t>(d < 0 ? -d : d);
    std::vector<std::int8_t> period(q);
    for (std::uint64_t r = 0; r < q; ++r)
        period[r] = static_cast<std::int8_t>(kronecker_symbol(d, r));
    period[0] = 0;

    // Validate: zeros exactly at non-units, periodic multiplicativity,
    // full-period cancellation.
    std::int64_t total = 0;
    for (std::uint64_t r = 0; r < q; ++r) {
        const bool unit = std::gcd(r, q) == 1;
        if ((period[r] != 0) != unit)
            throw ConstructionError("character table for q=" + std::to_string(q) +
                                    " vanishes off the non-units");
        total += period[r];
    }
    if (total != 0)
        throw ConstructionError("character for q=" + std::to_string(q) + " is principal");
    for (std::uint64_t a = 1; a < q && q <= 4096; ++a)
        for (std::uint64_t b = a; b < q; ++b)
            if (period[(a * b) % q] != period[a] * period[b])
                throw ConstructionError("character table for q=" + std::to_string(q) +
                                        " is not multiplicative");
    return RealCharacter(q, d, std::move(period));
}

RealCharacter build_real_character(std::uint64_t q)
{
    if (q >= 3 && q <= static_cast<std::uint64_t>(INT64_MAX)) {
        const auto s = static_cast<std::int64_t>(q);
        if (is_fundamental_discriminant(s))
            return build_character_from_discriminant(s);
        if (is_fundamental_discriminant(-s))
            return build_character_from_discriminant(-s);
    }
    throw ConstructionError("modulus " + std::to_string(q) +
                            " has no supported primitive real non-principal character");
}

std::uint64_t parse_character_name(const std::string& name)
{
    std::string digits = name;
    if (digits.rfind("chi_", 0) == 0)
        digits = digits.substr(4);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw ConstructionError("cannot parse character name '" + name + "'");
    return std::stoull(digits);
}

DenseValueTable character_table(const RealCharacter& chi, std::uint64_t lo, std::uint64_t hi)
{
    check_segment_range(lo, hi);
    DenseValueTable table{lo, hi, std::vector<std::int8_t>(hi - lo + 1), chi.name()};
    std::uint64_t r = lo % chi.modulus();
    const auto& period = chi.period_values();
    for (auto& v : table.values) {
        v = period[r];
        if (++r == chi.modulus())
            r = 0;
    }
    return table;
}

} // namespace kfree
