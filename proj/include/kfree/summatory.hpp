// summatory.hpp
// Exact partial sums M_f(x) = sum_{n<=x} f(n): streaming segmented
// summation with checkpoints, two Mertens paths, and the Dirichlet
// hyperbola identity on integer-floored splits.

#pragma once

#include "kfree/characters.hpp"
#include "kfree/mult_engine.hpp"
#include "kfree/sieve.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kfree {

// Checkpoints at which partial sums are recorded. The geometric schedule is
// x_{i+1} = ceil(ratio * x_i) from `start`, plus every power of ten, plus
// the final limit. Ratios are held in parts per million so the point set is
// a pure integer computation.
class CheckpointSchedule {
public:
    static CheckpointSchedule geometric(double ratio = 1.05, std::uint64_t start = 10);
    static CheckpointSchedule explicit_points(std::vector<std::uint64_t> points);

    // Sorted, deduplicated points in [1, limit]; always ends with `limit`.
    std::vector<std::uint64_t> points(std::uint64_t limit) const;

    double ratio() const noexcept { return static_cast<double>(ratio_ppm_) / 1e6; }
    std::uint64_t start() const noexcept { return start_; }
    bool is_geometric() const noexcept { return explicit_.empty(); }

private:
    std::uint64_t ratio_ppm_ = 1'050'000;
    std::uint64_t start_ = 10;
    std::vector<std::uint64_t> explicit_;
};

struct Checkpoint {
    std::uint64_t x;
    std::int64_t m;        // M(x)
    std::int64_t abs_max;  // max_{t<=x} |M(t)|, over every t, not only checkpoints
};

struct PartialSumSeries {
    std::string label;
    std::vector<Checkpoint> checkpoints;  // strictly increasing x

    std::int64_t final_value() const { return checkpoints.empty() ? 0 : checkpoints.back().m; }
    // M at checkpoint x; RangeError if x is not a checkpoint.
    std::int64_t at(std::uint64_t x) const;
};

struct SummationOptions {
    std::size_t segment_size = kDefaultSegmentSize;
    unsigned threads = 1;
    std::uint64_t max_limit = 1'000'000'000'000ULL;
};

PartialSumSeries direct_summatory(const MultiplicativeRule& rule, std::uint64_t limit,
                                  const CheckpointSchedule& schedule,
                                  const SummationOptions& options = {});

std::int64_t mertens(std::uint64_t limit, const SummationOptions& options = {});

// M(x) = 1 - sum_{d=2}^{x} M(floor(x/d)), memoised over the distinct floor
// values of x. Independent of every sieve in the library.
std::int64_t mertens_recursive(std::uint64_t limit);

PartialSumSeries summatory_mu_chi(const RealCharacter& chi, std::uint64_t limit,
                                  const CheckpointSchedule& schedule,
                                  const SummationOptions& options = {});

// CSV with header "x,M,abs_max".
void write_series_csv(const PartialSumSeries& series, std::ostream& out);

// Value and partial-sum access to one arithmetic function up to limit().
// Implementations must be safe for concurrent reads.
class SumOracle {
public:
    virtual ~SumOracle() = default;
    virtual std::uint64_t limit() const = 0;
    virtual std::int64_t value(std::uint64_t n) const = 0;
    // M(x); M(0) = 0.
    virtual std::int64_t partial_sum(std::uint64_t x) const = 0;
    // Smallest m >= n where value(m) may be nonzero.
    virtual std::uint64_t next_support(std::uint64_t n) const { return n; }

protected:
    void require(std::uint64_t n) const;
};

// Dense prefix table over [1, N].
class TableOracle final : public SumOracle {
public:
    explicit TableOracle(const DenseValueTable& table);
    explicit TableOracle(const ConvolutionTable& table);
    // Prefix sums of `rule` over [1, n], sieved segment by segment.
    static TableOracle from_rule(const MultiplicativeRule& rule, std::uint64_t n,
                                 std::size_t segment_size = kDefaultSegmentSize);

    std::uint64_t limit() const override { return prefix_.size() - 1; }
    std::int64_t value(std::uint64_t n) const override;
    std::int64_t partial_sum(std::uint64_t x) const override;

private:
    TableOracle() = default;
    std::vector<std::int64_t> prefix_;  // prefix_[x] = M(x); values are differences
};

// h(m^k) = c(m), zero off k-th powers. M_h(x) is a sum over m <= x^(1/k),
// so coefficients up to N^(1/k) answer every argument up to N.
class PowerSupportedOracle final : public SumOracle {
public:
    PowerSupportedOracle(unsigned k, const DenseValueTable& coefficients);

    std::uint64_t limit() const override { return limit_; }
    std::int64_t value(std::uint64_t n) const override;
    std::int64_t partial_sum(std::uint64_t x) const override;
    std::uint64_t next_support(std::uint64_t n) const override;

private:
    unsigned k_;
    std::uint64_t limit_;
    std::vector<std::int64_t> coeff_;   // coeff_[m - 1] = c(m)
    std::vector<std::int64_t> prefix_;  // prefix_[m] = sum_{j<=m} c(j)
};

// Dense prefix oracles are capped at this many entries.
inline constexpr std::uint64_t kMaxOracleTable = 100'000'000;

// Coefficients c(m) = mu(m) g(m)^k of closed_form_h, up to m <= iroot(x, k).
PowerSupportedOracle closed_form_h_oracle(unsigned k, const MultiplicativeRule& g, std::uint64_t x);

// A split x = U V with U, V >= 1, carried as the integer floors the
// identity actually uses. Invariant: (u_floor + 1)(v_floor + 1) > x, which
// is exactly what makes the floored identity exact.
struct HyperbolaSplit {
    std::uint64_t x = 1;
    double u = 1.0;
    double v = 1.0;
    std::uint64_t u_floor = 1;
    std::uint64_t v_floor = 1;

    // Real U, V with U V = x to within 1e-9 relative; ValidationError otherwise.
    static HyperbolaSplit from_reals(std::uint64_t x, double u, double v);
    static HyperbolaSplit from_floors(std::uint64_t x, std::uint64_t u_floor, std::uint64_t v_floor);
    // U = V = sqrt(x)
    static HyperbolaSplit balanced(std::uint64_t x);
};

// U = x^(2k/(2k+1)), V = x^(1/(2k+1)).
HyperbolaSplit theorem2_split(std::uint64_t x, unsigned k);

// sum_{n<=U} h(n) M_g(x/n) + sum_{n<=V} g(n) M_h(x/n) - M_g(V) M_h(U),
// which equals M_{h*g}(x). MissingArgumentError if an oracle is too short.
std::int64_t hyperbola_sum(const SumOracle& h, const SumOracle& g, const HyperbolaSplit& split);

} // namespace kfree
