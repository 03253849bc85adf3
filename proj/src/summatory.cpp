#include "kfree/summatory.hpp"

#include "kfree/errors.hpp"
#include "kfree/intmath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace kfree {

namespace {

constexpr std::uint64_t kMaxRecursiveMertens = 100'000'000'000ULL;

std::int64_t narrow_sum(__int128 v)
{
    if (v > INT64_MAX || v < INT64_MIN)
        throw RangeError("hyperbola sum overflows 64 bits");
    return static_cast<std::int64_t>(v);
}

} // namespace

CheckpointSchedule CheckpointSchedule::geometric(double ratio, std::uint64_t start)
{
    if (!(ratio > 1.0) || !std::isfinite(ratio))
        throw ValidationError("schedule ratio must be a finite number > 1");
    if (start < 1)
        throw ValidationError("schedule start must be >= 1");
    CheckpointSchedule s;
    s.ratio_ppm_ = static_cast<std::uint64_t>(std::llround(ratio * 1e6));
    if (s.ratio_ppm_ <= 1'000'000)
        throw ValidationError("schedule ratio rounds to 1 at ppm resolution");
    s.start_ = start;
    return s;
}

CheckpointSchedule CheckpointSchedule::explicit_points(std::vector<std::uint64_t> points)
{
    if (points.empty())
        throw ValidationError("explicit schedule needs at least one point");
    for (auto p : points)
        if (p < 1)
            throw ValidationError("schedule points must be >= 1");
    CheckpointSchedule s;
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    s.explicit_ = std::move(points);
    return s;
}

std::vector<std::uint64_t> CheckpointSchedule::points(std::uint64_t limit) const
{
    std::vector<std::uint64_t> out;
    if (limit < 1)
        return out;
    if (explicit_.empty()) {
        for (std::uint64_t x = start_; x <= limit;) {
            out.push_back(x);
            const unsigned __int128 scaled = static_cast<unsigned __int128>(x) * ratio_ppm_;
            const auto next = static_cast<std::uint64_t>((scaled + 999'999) / 1'000'000);
            x = std::max(x + 1, next);
        }
        for (std::uint64_t p = 1; p <= limit; p *= 10) {
            out.push_back(p);
            if (p > limit / 10)
                break;
        }
    } else {
        for (auto p : explicit_)
            if (p <= limit)
                out.push_back(p);
    }
    out.push_back(limit);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::int64_t PartialSumSeries::at(std::uint64_t x) const
{
    auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), x,
                               [](const Checkpoint& c, std::uint64_t v) { return c.x < v; });
    if (it == checkpoints.end() || it->x != x)
        throw RangeError(label + ": x=" + std::to_string(x) + " is not a checkpoint");
    return it->m;
}

PartialSumSeries direct_summatory(const MultiplicativeRule& rule, std::uint64_t limit,
                                  const CheckpointSchedule& schedule, const SummationOptions& options)
{
    if (limit < 1)
        throw RangeError("summation limit must be >= 1");
    if (limit > kMaxArgument)
        throw RangeError("summation limit exceeds 2^63-1");
    if (limit > options.max_limit)
        throw CapacityError("summation limit " + std::to_string(limit) + " exceeds the budget of " +
                            std::to_string(options.max_limit));
    if (options.segment_size == 0)
        throw ValidationError("segment size must be positive");

    const auto points = schedule.points(limit);
    const auto primes = base_primes_for(limit);
    const unsigned threads = std::max(1U, options.threads);
    const std::uint64_t seg = options.segment_size;

    PartialSumSeries series{rule.label(), {}};
    series.checkpoints.reserve(points.size());
    std::int64_t sum = 0;
    std::int64_t abs_max = 0;
    std::size_t next_point = 0;

    std::vector<DenseValueTable> batch(threads);
    for (std::uint64_t lo = 1; lo <= limit;) {
        // Sieve up to `threads` consecutive segments, then reduce in order.
        unsigned used = 0;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
        for (std::uint64_t a = lo; used < threads && a <= limit; ++used) {
            const std::uint64_t b = (limit - a < seg) ? limit : a + seg - 1;
            ranges.emplace_back(a, b);
            a = b + 1;
        }
        if (used == 1) {
            batch[0] = tabulate(rule, ranges[0].first, ranges[0].second, primes);
        } else {
            std::vector<std::thread> workers;
            workers.reserve(used);
            for (unsigned t = 0; t < used; ++t)
                workers.emplace_back([&, t] {
                    batch[t] = tabulate(rule, ranges[t].first, ranges[t].second, primes);
                });
            for (auto& w : workers)
                w.join();
        }
        for (unsigned t = 0; t < used; ++t) {
            const auto& table = batch[t];
            for (std::uint64_t n = table.lo; n <= table.hi; ++n) {
                sum += table(n);
                abs_max = std::max(abs_max, sum < 0 ? -sum : sum);
                if (n == points[next_point]) {
                    series.checkpoints.push_back({n, sum, abs_max});
                    ++next_point;
                }
            }
        }
        lo = ranges.back().second + 1;
    }
    return series;
}

std::int64_t mertens(std::uint64_t limit, const SummationOptions& options)
{
    return direct_summatory(MultiplicativeRule::mobius(), limit,
                            CheckpointSchedule::explicit_points({limit}), options)
        .final_value();
}

std::int64_t mertens_recursive(std::uint64_t limit)
{
    if (limit < 1)
        throw RangeError("mertens_recursive: limit must be >= 1");
    if (limit > kMaxRecursiveMertens)
        throw CapacityError("mertens_recursive: limit " + std::to_string(limit) + " exceeds budget");

    const std::uint64_t root = isqrt(limit);
    std::vector<std::int64_t> small(root + 1, 0);  // small[v] = M(v), v <= root
    std::vector<std::int64_t> large(root + 1, 0);  // large[i] = M(limit / i)

    auto lookup = [&](std::uint64_t q) -> std::int64_t {
        return q <= root ? small[q] : large[limit / q];
    };
    auto compute = [&](std::uint64_t v) -> std::int64_t {
        std::int64_t m = 1;
        for (std::uint64_t d = 2; d <= v;) {
            const std::uint64_t q = v / d;
            const std::uint64_t d_hi = v / q;
            m -= static_cast<std::int64_t>(d_hi - d + 1) * lookup(q);
            d = d_hi + 1;
        }
        return m;
    };

    for (std::uint64_t v = 1; v <= root; ++v)
        small[v] = compute(v);
    for (std::uint64_t i = root; i >= 1; --i) {
        const std::uint64_t v = limit / i;
        large[i] = v <= root ? small[v] : compute(v);
    }
    return large[1];
}

PartialSumSeries summatory_mu_chi(const RealCharacter& chi, std::uint64_t limit,
                                  const CheckpointSchedule& schedule, const SummationOptions& options)
{
    return direct_summatory(MultiplicativeRule::mobius() * MultiplicativeRule::character(chi), limit,
                            schedule, options);
}

void write_series_csv(const PartialSumSeries& series, std::ostream& out)
{
    out << "x,M,abs_max\n";
    for (const auto& c : series.checkpoints)
        out << c.x << ',' << c.m << ',' << c.abs_max << '\n';
}

void SumOracle::require(std::uint64_t n) const
{
    if (n > limit())
        throw MissingArgumentError("oracle asked for argument " + std::to_string(n) +
                                   " beyond its limit " + std::to_string(limit()));
}

TableOracle::TableOracle(const DenseValueTable& table)
{
    if (table.lo != 1 || table.size() != table.hi)
        throw ShapeError("TableOracle needs a table over [1, N]");
    prefix_.assign(table.size() + 1, 0);
    for (std::size_t i = 0; i < table.size(); ++i)
        prefix_[i + 1] = prefix_[i] + table.values[i];
}

TableOracle::TableOracle(const ConvolutionTable& table)
{
    prefix_.assign(table.values.size() + 1, 0);
    for (std::size_t i = 0; i < table.values.size(); ++i)
        prefix_[i + 1] = prefix_[i] + table.values[i];
}

TableOracle TableOracle::from_rule(const MultiplicativeRule& rule, std::uint64_t n,
                                   std::size_t segment_size)
{
    if (n < 1)
        throw RangeError("TableOracle::from_rule: n must be >= 1");
    if (n > kMaxOracleTable)
        throw CapacityError("prefix table of " + std::to_string(n) + " entries exceeds the budget");
    if (segment_size == 0)
        throw ValidationError("segment size must be positive");
    const auto primes = base_primes_for(n);
    TableOracle oracle;
    oracle.prefix_.assign(n + 1, 0);
    for (std::uint64_t lo = 1; lo <= n; lo += segment_size) {
        const std::uint64_t hi = std::min<std::uint64_t>(n, lo + segment_size - 1);
        const auto table = tabulate(rule, lo, hi, primes);
        for (std::uint64_t m = lo; m <= hi; ++m)
            oracle.prefix_[m] = oracle.prefix_[m - 1] + table(m);
    }
    return oracle;
}

std::int64_t TableOracle::value(std::uint64_t n) const
{
    require(n);
    return n == 0 ? 0 : prefix_[n] - prefix_[n - 1];
}

std::int64_t TableOracle::partial_sum(std::uint64_t x) const
{
    require(x);
    return prefix_[x];
}

PowerSupportedOracle::PowerSupportedOracle(unsigned k, const DenseValueTable& coefficients) : k_(k)
{
    check_k(k);
    if (coefficients.lo != 1 || coefficients.size() != coefficients.hi)
        throw ShapeError("PowerSupportedOracle needs coefficients over [1, M]");
    coeff_.assign(coefficients.values.begin(), coefficients.values.end());
    prefix_.assign(coeff_.size() + 1, 0);
    for (std::size_t i = 0; i < coeff_.size(); ++i)
        prefix_[i + 1] = prefix_[i] + coeff_[i];
    const auto next = checked_pow(coeff_.size() + 1, k, kMaxArgument);
    limit_ = next ? *next - 1 : kMaxArgument;
}

std::int64_t PowerSupportedOracle::value(std::uint64_t n) const
{
    require(n);
    if (n == 0)
        return 0;
    const auto m = exact_root(n, k_);
    return m ? coeff_[*m - 1] : 0;
}

std::int64_t PowerSupportedOracle::partial_sum(std::uint64_t x) const
{
    require(x);
    return prefix_[iroot(x, k_)];
}

std::uint64_t PowerSupportedOracle::next_support(std::uint64_t n) const
{
    if (n <= 1)
        return 1;
    const std::uint64_t m = iroot(n - 1, k_) + 1;
    const auto p = checked_pow(m, k_);
    return p ? *p : UINT64_MAX;
}

PowerSupportedOracle closed_form_h_oracle(unsigned k, const MultiplicativeRule& g, std::uint64_t x)
{
    check_k(k);
    if (g.k_truncation())
        throw ValidationError("closed_form_h_oracle: g must be completely multiplicative");
    const std::uint64_t roots = std::max<std::uint64_t>(1, iroot(x, k));
    const auto mu = sieve_mobius_segment(1, roots);
    const auto gv = tabulate(g, 1, roots);
    DenseValueTable coeff{1, roots, std::vector<std::int8_t>(roots), "c"};
    for (std::uint64_t m = 1; m <= roots; ++m) {
        const int gm = gv(m);
        coeff.values[m - 1] = static_cast<std::int8_t>(mu(m) * ((k % 2 == 0) ? gm * gm : gm));
    }
    return PowerSupportedOracle(k, coeff);
}

HyperbolaSplit HyperbolaSplit::from_floors(std::uint64_t x, std::uint64_t u_floor, std::uint64_t v_floor)
{
    if (x < 1 || u_floor < 1 || v_floor < 1)
        throw ValidationError("hyperbola split needs x, U, V >= 1");
    const unsigned __int128 cover =
        static_cast<unsigned __int128>(u_floor + 1) * static_cast<unsigned __int128>(v_floor + 1);
    if (cover <= x)
        throw ValidationError("hyperbola split misses lattice points: (U'+1)(V'+1) <= x for x=" +
                              std::to_string(x));
    HyperbolaSplit s;
    s.x = x;
    s.u_floor = u_floor;
    s.v_floor = v_floor;
    s.u = static_cast<double>(u_floor);
    s.v = static_cast<double>(x) / s.u;
    return s;
}

HyperbolaSplit HyperbolaSplit::from_reals(std::uint64_t x, double u, double v)
{
    if (!(u >= 1.0) || !(v >= 1.0) || !std::isfinite(u) || !std::isfinite(v))
        throw ValidationError("hyperbola split needs finite U, V >= 1");
    const double xd = static_cast<double>(x);
    if (std::fabs(u * v - xd) > 1e-9 * xd)
        throw ValidationError("hyperbola split needs U*V = x");
    auto s = from_floors(x, static_cast<std::uint64_t>(std::floor(u)),
                         static_cast<std::uint64_t>(std::floor(v)));
    s.u = u;
    s.v = v;
    return s;
}

HyperbolaSplit HyperbolaSplit::balanced(std::uint64_t x)
{
    const std::uint64_t r = isqrt(x);
    auto s = from_floors(x, r, r);
    s.u = s.v = std::sqrt(static_cast<double>(x));
    return s;
}

HyperbolaSplit theorem2_split(std::uint64_t x, unsigned k)
{
    if (x < 1)
        throw ValidationError("theorem2_split: x must be >= 1");
    check_k(k);
    const unsigned den = 2 * k + 1;
    HyperbolaSplit out = HyperbolaSplit::from_floors(x, floor_rational_power(x, 2 * k, den), iroot(x, den));
    out.u = std::pow(static_cast<double>(x), static_cast<double>(2 * k) / den);
    out.v = std::pow(static_cast<double>(x), 1.0 / den);
    return out;
}

std::int64_t hyperbola_sum(const SumOracle& h, const SumOracle& g, const HyperbolaSplit& split)
{
    const std::uint64_t x = split.x;
    const std::uint64_t u = split.u_floor;
    const std::uint64_t v = split.v_floor;

    __int128 first = 0;
    for (std::uint64_t n = h.next_support(1); n <= u; n = h.next_support(n + 1)) {
        const std::int64_t hn = h.value(n);
        if (hn != 0)
            first += static_cast<__int128>(hn) * g.partial_sum(x / n);
    }
    __int128 second = 0;
    for (std::uint64_t n = g.next_support(1); n <= v; n = g.next_support(n + 1)) {
        const std::int64_t gn = g.value(n);
        if (gn != 0)
            second += static_cast<__int128>(gn) * h.partial_sum(x / n);
    }
    const __int128 correction = static_cast<__int128>(g.partial_sum(v)) * h.partial_sum(u);
    return narrow_sum(first + second - correction);
}

} // namespace kfree
