#include "kfree/mult_engine.hpp"

#include "kfree/errors.hpp"
#include "kfree/intmath.hpp"

#include <algorithm>
#include <ostream>

namespace kfree {

namespace {

class ConstantSource final : public PrimeValueSource {
public:
    explicit ConstantSource(int v) : value_(v) {}
    int at_prime(std::uint64_t) const override { return value_; }

private:
    int value_;
};

class CharacterSource final : public PrimeValueSource {
public:
    explicit CharacterSource(RealCharacter chi) : chi_(std::move(chi)) {}
    int at_prime(std::uint64_t p) const override { return chi_(p); }

private:
    RealCharacter chi_;
};

class ProductSource final : public PrimeValueSource {
public:
    ProductSource(std::shared_ptr<const PrimeValueSource> a, std::shared_ptr<const PrimeValueSource> b)
        : a_(std::move(a)), b_(std::move(b))
    {}
    int at_prime(std::uint64_t p) const override { return a_->at_prime(p) * b_->at_prime(p); }

private:
    std::shared_ptr<const PrimeValueSource> a_;
    std::shared_ptr<const PrimeValueSource> b_;
};

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out))
        throw RangeError("convolution value overflows 64 bits");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        throw RangeError("convolution value overflows 64 bits");
    return out;
}

void require_prefix(const DenseValueTable& t)
{
    if (t.lo != 1 || t.values.size() != t.hi)
        throw ShapeError(t.label + ": table must cover [1, N]");
}

ConvolutionTable convolve_impl(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                               std::pair<std::string, std::string> operands)
{
    if (a.size() != b.size())
        throw ShapeError("convolution operands have different lengths (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    const std::uint64_t n = a.size();
    ConvolutionTable out{n, std::vector<std::int64_t>(n, 0), std::move(operands)};
    for (std::uint64_t d = 1; d <= n; ++d) {
        const std::int64_t ad = a[d - 1];
        if (ad == 0)
            continue;
        for (std::uint64_t m = 1, idx = d; idx <= n; ++m, idx += d) {
            const std::int64_t bm = b[m - 1];
            if (bm != 0)
                out.values[idx - 1] = checked_add(out.values[idx - 1], checked_mul(ad, bm));
        }
    }
    return out;
}

ConvolutionTable inverse_impl(std::span<const std::int64_t> a, std::string label)
{
    if (a.empty())
        throw ShapeError("cannot invert an empty table");
    const std::int64_t unit = a[0];
    if (unit != 1 && unit != -1)
        throw NonInvertibleError(label + ": a(1) = " + std::to_string(unit) +
                                 " is not a unit, no integer Dirichlet inverse");
    const std::uint64_t n = a.size();
    ConvolutionTable out{n, std::vector<std::int64_t>(n, 0), {label, "inverse"}};
    std::vector<std::int64_t> acc(n, 0);
    for (std::uint64_t m = 1; m <= n; ++m) {
        // a(1) = +-1 is its own inverse.
        const std::int64_t bm = (m == 1) ? unit : checked_mul(-unit, acc[m - 1]);
        out.values[m - 1] = bm;
        if (bm == 0)
            continue;
        for (std::uint64_t d = 2, idx = 2 * m; idx <= n; ++d, idx += m) {
            const std::int64_t ad = a[d - 1];
            if (ad != 0)
                acc[idx - 1] = checked_add(acc[idx - 1], checked_mul(ad, bm));
        }
    }
    return out;
}

std::int8_t narrow(std::int64_t v, const std::string& what)
{
    if (v < INT8_MIN || v > INT8_MAX)
        throw RangeError(what + ": value " + std::to_string(v) + " does not fit a signed byte");
    return static_cast<std::int8_t>(v);
}

} // namespace

MultiplicativeRule::MultiplicativeRule(std::shared_ptr<const PrimeValueSource> base,
                                       std::optional<unsigned> k_truncation, std::string label)
    : base_(std::move(base)), k_(k_truncation), label_(std::move(label))
{
    if (!base_)
        throw ValidationError("multiplicative rule needs a prime-value source");
    if (k_)
        check_k(*k_);
}

MultiplicativeRule MultiplicativeRule::constant_one()
{
    return {std::make_shared<ConstantSource>(1), std::nullopt, "1"};
}

MultiplicativeRule MultiplicativeRule::liouville()
{
    return {std::make_shared<ConstantSource>(-1), std::nullopt, "lambda"};
}

MultiplicativeRule MultiplicativeRule::mobius()
{
    return {std::make_shared<ConstantSource>(-1), 2U, "mu"};
}

MultiplicativeRule MultiplicativeRule::character(const RealCharacter& chi)
{
    return {std::make_shared<CharacterSource>(chi), std::nullopt, chi.name()};
}

MultiplicativeRule MultiplicativeRule::restricted_to_kfree(unsigned k) const
{
    check_k(k);
    const unsigned eff = k_ ? std::min(*k_, k) : k;
    return {base_, eff, "mu_" + std::to_string(k) + "^2*" + label_};
}

int MultiplicativeRule::prime_power_value(std::uint64_t p, unsigned r) const
{
    if (r == 0)
        return 1;
    if (k_ && r >= *k_)
        return 0;
    const int g = prime_value(p);
    return (r % 2 == 0) ? g * g : g;
}

MultiplicativeRule operator*(const MultiplicativeRule& a, const MultiplicativeRule& b)
{
    std::optional<unsigned> k = a.k_truncation();
    if (b.k_truncation())
        k = k ? std::min(*k, *b.k_truncation()) : b.k_truncation();
    return {std::make_shared<ProductSource>(a.base(), b.base()), k, a.label() + "*" + b.label()};
}

ConvolutionTable to_exact(const DenseValueTable& table)
{
    require_prefix(table);
    return {table.hi, std::vector<std::int64_t>(table.values.begin(), table.values.end()),
            {table.label, ""}};
}

int evaluate(const MultiplicativeRule& rule, std::uint64_t n, const SpfTable& spf)
{
    if (n < 1 || n > spf.limit())
        throw RangeError(rule.label() + ": n=" + std::to_string(n) + " outside the factor table [1, " +
                         std::to_string(spf.limit()) + "]");
    int value = 1;
    for (auto [p, e] : spf.factorize(n)) {
        value *= rule.prime_power_value(p, e);
        if (value == 0)
            break;
    }
    return value;
}

DenseValueTable tabulate(const MultiplicativeRule& rule, std::uint64_t lo, std::uint64_t hi)
{
    check_segment_range(lo, hi);
    const auto primes = base_primes_for(hi);
    return tabulate(rule, lo, hi, primes);
}

DenseValueTable tabulate(const MultiplicativeRule& rule, std::uint64_t lo, std::uint64_t hi,
                         std::span<const std::uint64_t> base_primes)
{
    check_segment_range(lo, hi);
    const std::size_t len = hi - lo + 1;
    DenseValueTable table{lo, hi, std::vector<std::int8_t>(len, 1), rule.label()};
    std::vector<std::uint64_t> prod(len, 1);
    const unsigned k = rule.k_truncation().value_or(UINT32_MAX);

    for (std::uint64_t p : base_primes) {
        if (p > hi / p)
            break;
        const int gp = rule.prime_value(p);
        std::uint64_t pe = p;
        for (unsigned e = 1;; ++e) {
            for (std::uint64_t m = ((lo + pe - 1) / pe) * pe; m <= hi; m += pe) {
                auto& v = table.values[m - lo];
                v = (e >= k) ? 0 : static_cast<std::int8_t>(v * gp);
                prod[m - lo] *= p;
            }
            if (pe > hi / p)
                break;
            pe *= p;
        }
    }
    // The cofactor n / prod is 1 or a single prime above sqrt(hi).
    for (std::size_t i = 0; i < len; ++i) {
        auto& v = table.values[i];
        const std::uint64_t n = lo + i;
        if (v != 0 && prod[i] != n)
            v = static_cast<std::int8_t>(v * rule.prime_value(n / prod[i]));
    }
    return table;
}

ConvolutionTable dirichlet_convolve(const DenseValueTable& a, const DenseValueTable& b)
{
    require_prefix(a);
    require_prefix(b);
    const auto ea = to_exact(a);
    const auto eb = to_exact(b);
    return convolve_impl(ea.values, eb.values, {a.label, b.label});
}

ConvolutionTable dirichlet_convolve(const ConvolutionTable& a, const ConvolutionTable& b)
{
    return convolve_impl(a.values, b.values, {a.operands.first, b.operands.first});
}

ConvolutionTable dirichlet_inverse(const DenseValueTable& a)
{
    require_prefix(a);
    return inverse_impl(to_exact(a).values, a.label);
}

ConvolutionTable dirichlet_inverse(const ConvolutionTable& a)
{
    return inverse_impl(a.values, a.operands.first);
}

DenseValueTable pointwise_product(const DenseValueTable& a, const DenseValueTable& b)
{
    if (a.lo != b.lo || a.hi != b.hi || a.size() != b.size())
        throw ShapeError("pointwise product of " + a.label + " and " + b.label +
                         " over different ranges");
    DenseValueTable out{a.lo, a.hi, std::vector<std::int8_t>(a.size()), a.label + "*" + b.label};
    for (std::size_t i = 0; i < a.size(); ++i)
        out.values[i] = narrow(static_cast<std::int64_t>(a.values[i]) * b.values[i], out.label);
    return out;
}

DenseValueTable closed_form_h(unsigned k, const MultiplicativeRule& g, std::uint64_t n)
{
    check_k(k);
    if (g.k_truncation())
        throw ValidationError("closed_form_h: g must be completely multiplicative, got " + g.label());
    check_segment_range(1, n);
    DenseValueTable h{1, n, std::vector<std::int8_t>(n, 0), "h_" + std::to_string(k)};
    const std::uint64_t roots = iroot(n, k);
    const auto mu = sieve_mobius_segment(1, roots);
    const auto gv = tabulate(g, 1, roots);
    for (std::uint64_t m = 1; m <= roots; ++m) {
        const int gm = gv(m);
        const int gk = (k % 2 == 0) ? gm * gm : gm;
        h.values[*checked_pow(m, k) - 1] = static_cast<std::int8_t>(mu(m) * gk);
    }
    return h;
}

DenseValueTable lemma3_h(const MultiplicativeRule& g, const RealCharacter& chi, std::uint64_t n)
{
    check_segment_range(1, n);
    const SpfTable spf(n);
    DenseValueTable h{1, n, std::vector<std::int8_t>(n, 0), "h_lemma3"};
    h.values[0] = 1;
    for (std::uint64_t m = 2; m <= n; ++m) {
        std::int64_t value = 1;
        for (auto [p, r] : spf.factorize(m)) {
            const int c = chi(p);
            const int diff = c - g.prime_value(p);
            // chi(p)^(r-1); 0^0 = 1
            const int lead = (r == 1) ? 1 : ((r - 1) % 2 == 0 ? c * c : c);
            value *= lead * diff;
            if (value == 0)
                break;
        }
        h.values[m - 1] = narrow(value, h.label);
    }
    return h;
}

std::optional<std::uint64_t> first_mismatch(const ConvolutionTable& a, const DenseValueTable& b)
{
    require_prefix(b);
    if (a.limit != b.hi)
        throw ShapeError("comparison over different ranges");
    for (std::uint64_t n = 1; n <= a.limit; ++n)
        if (a(n) != b(n))
            return n;
    return std::nullopt;
}

std::optional<std::uint64_t> first_mismatch(const ConvolutionTable& a, const ConvolutionTable& b)
{
    if (a.limit != b.limit)
        throw ShapeError("comparison over different ranges");
    for (std::uint64_t n = 1; n <= a.limit; ++n)
        if (a(n) != b(n))
            return n;
    return std::nullopt;
}

void write_table_csv(const ConvolutionTable& table, std::ostream& out)
{
    out << "n,value\n";
    for (std::uint64_t n = 1; n <= table.limit; ++n)
        out << n << ',' << table(n) << '\n';
}

} // namespace kfree
