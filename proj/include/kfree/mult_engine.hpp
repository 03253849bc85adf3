// mult_engine.hpp
// Multiplicative rules and the exact Dirichlet algebra on dense prefix tables:
// evaluation, convolution, inverse, pointwise products and the closed-form
// convolution factors h for k-free restrictions.

#pragma once

#include "kfree/characters.hpp"
#include "kfree/sieve.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kfree {

// Values of a completely multiplicative function at primes, in {-1, 0, 1}.
class PrimeValueSource {
public:
    virtual ~PrimeValueSource() = default;
    virtual int at_prime(std::uint64_t p) const = 0;
};

// f(n) = mu_k^2(n) * g(n) with g completely multiplicative (k optional).
// Immutable; copies share the underlying prime-value source.
class MultiplicativeRule {
public:
    MultiplicativeRule(std::shared_ptr<const PrimeValueSource> base,
                       std::optional<unsigned> k_truncation, std::string label);

    static MultiplicativeRule constant_one();
    // lambda: completely multiplicative, -1 at every prime.
    static MultiplicativeRule liouville();
    // mu = mu_2^2 * lambda
    static MultiplicativeRule mobius();
    static MultiplicativeRule character(const RealCharacter& chi);

    // This rule multiplied by mu_k^2 (the tighter truncation wins).
    MultiplicativeRule restricted_to_kfree(unsigned k) const;

    int prime_value(std::uint64_t p) const { return base_->at_prime(p); }
    // f(p^r); zero once r reaches the truncation order.
    int prime_power_value(std::uint64_t p, unsigned r) const;

    std::optional<unsigned> k_truncation() const noexcept { return k_; }
    const std::string& label() const noexcept { return label_; }
    const std::shared_ptr<const PrimeValueSource>& base() const noexcept { return base_; }

private:
    std::shared_ptr<const PrimeValueSource> base_;
    std::optional<unsigned> k_;
    std::string label_;
};

// Pointwise product of two rules: bases multiply, truncations take the minimum.
MultiplicativeRule operator*(const MultiplicativeRule& a, const MultiplicativeRule& b);

// Exact integer table over [1, limit], e.g. a convolution result.
struct ConvolutionTable {
    std::uint64_t limit = 0;
    std::vector<std::int64_t> values;  // values[n - 1]
    std::pair<std::string, std::string> operands;

    std::int64_t operator()(std::uint64_t n) const noexcept { return values[n - 1]; }
};

// Widens a table over [1, N].
ConvolutionTable to_exact(const DenseValueTable& table);

// f(n) from the factorisation in `spf`. RangeError beyond spf.limit().
int evaluate(const MultiplicativeRule& rule, std::uint64_t n, const SpfTable& spf);

// f(n) for n in [lo, hi] by a segmented multiplicative sieve. `base_primes`
// must contain every prime <= sqrt(hi).
DenseValueTable tabulate(const MultiplicativeRule& rule, std::uint64_t lo, std::uint64_t hi);
DenseValueTable tabulate(const MultiplicativeRule& rule, std::uint64_t lo, std::uint64_t hi,
                         std::span<const std::uint64_t> base_primes);

// (a * b)(n) = sum_{d | n} a(d) b(n/d) on [1, N]. ShapeError unless both
// start at 1 and share N; RangeError on 64-bit overflow.
ConvolutionTable dirichlet_convolve(const DenseValueTable& a, const DenseValueTable& b);
ConvolutionTable dirichlet_convolve(const ConvolutionTable& a, const ConvolutionTable& b);

// b with a * b = epsilon on [1, N]. NonInvertibleError unless a(1) = +-1.
ConvolutionTable dirichlet_inverse(const DenseValueTable& a);
ConvolutionTable dirichlet_inverse(const ConvolutionTable& a);

DenseValueTable pointwise_product(const DenseValueTable& a, const DenseValueTable& b);

// h = (mu_k^2 g) * g^{-1} on [1, N]: zero off k-th powers and
// h(m^k) = mu(m) g(m)^k, i.e. mu(m) g(m) for odd k and mu(m) for even k when
// g is +-1 valued. `g` must be completely multiplicative (no truncation).
DenseValueTable closed_form_h(unsigned k, const MultiplicativeRule& g, std::uint64_t n);

// h = (mu g) * chi on [1, N]: multiplicative with
// h(p^r) = chi(p)^{r-1} (chi(p) - g(p)).
DenseValueTable lemma3_h(const MultiplicativeRule& g, const RealCharacter& chi, std::uint64_t n);

// First n where the tables differ, or nullopt if equal on their common range.
// ShapeError if the ranges differ.
std::optional<std::uint64_t> first_mismatch(const ConvolutionTable& a, const DenseValueTable& b);
std::optional<std::uint64_t> first_mismatch(const ConvolutionTable& a, const ConvolutionTable& b);

void write_table_csv(const ConvolutionTable& table, std::ostream& out);

} // namespace kfree
