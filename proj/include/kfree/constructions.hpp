// constructions.hpp
// Modified real characters g, the unit-on-q construction, the prime budget
// sum_{p<=x} |1 - g(p) chi(p)| with its finite-range verifier and greedy
// plan builder, and the pretentious distance D(f, g; x).

#pragma once

#include "kfree/characters.hpp"
#include "kfree/mult_engine.hpp"
#include "kfree/summatory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kfree {

// Primes where g deviates from chi. With unit_on_q_divisors, g(p) = 1 for
// p | q and g is +-1 valued; without it g(p) = chi(p) = 0 there.
struct ModificationPlan {
    RealCharacter base;
    std::vector<std::uint64_t> flipped_primes;  // sorted, none divides q
    bool unit_on_q_divisors = true;

    static ModificationPlan empty(const RealCharacter& chi, bool unit_on_q_divisors = true);

    // ValidationError on unsorted/duplicate entries, non-primes or p | q.
    void validate() const;
    std::size_t flipped_up_to(std::uint64_t x) const;
};

// {"modulus": q, "flipped_primes": [...], "unit_on_q_divisors": bool}
std::string plan_to_json(const ModificationPlan& plan);
ModificationPlan plan_from_json(const std::string& text);
ModificationPlan load_plan(const std::string& path);
void save_plan(const ModificationPlan& plan, const std::string& path);

// g(p) = -chi(p) on flipped primes, 1 (or 0) on p | q, chi(p) elsewhere.
MultiplicativeRule modified_g(const ModificationPlan& plan);

// g = chi on integers coprime to q and g(p) = 1 for p | q.
MultiplicativeRule theorem2_g(const RealCharacter& chi);

// S(x) = sum_{p<=x} |1 - g(p) chi(p)|, exact.
std::int64_t condition1_sum(const MultiplicativeRule& g, const RealCharacter& chi, std::uint64_t x);

struct BudgetParams {
    double big_c = 2.0;     // implicit constant C
    double small_c = 1.0;   // c in exp(-c sqrt(log x))
    unsigned k = 2;
    std::uint64_t x0 = 10;  // verification starts here

    void validate() const;
    // C x^(1/k) exp(-c sqrt(log x))
    double bound(std::uint64_t x) const;
};

struct BudgetRow {
    std::uint64_t x;
    std::int64_t s;
    double budget;
    bool pass;
};

struct BudgetReport {
    std::vector<BudgetRow> rows;
    bool all_pass = true;
    std::optional<std::uint64_t> first_violation;
};

// Checks S(x) <= C x^(1/k) exp(-c sqrt(log x)) at the schedule's points in
// [x0, X] (x0 and X included). Violations are report content.
BudgetReport verify_condition1(const MultiplicativeRule& g, const RealCharacter& chi,
                               const BudgetParams& params, std::uint64_t limit,
                               const CheckpointSchedule& schedule);

// CSV "x,S,budget,pass".
void write_budget_csv(const BudgetReport& report, std::ostream& out);

// Flips primes p not dividing q in increasing order, keeping p only if the
// budget still holds at every integer x in [max(p, x0), X].
ModificationPlan greedy_admissible_plan(const RealCharacter& chi, const BudgetParams& params,
                                        std::uint64_t limit);

// D(f, g; x)^2 = sum_{p<=x} (1 - f(p) g(p)) / p, compensated summation.
double pretentious_distance_squared(const MultiplicativeRule& f, const MultiplicativeRule& g,
                                    std::uint64_t x);
double pretentious_distance(const MultiplicativeRule& f, const MultiplicativeRule& g, std::uint64_t x);

struct DistancePoint {
    std::uint64_t x;
    double distance_squared;
};
std::vector<DistancePoint> pretentious_distance_series(const MultiplicativeRule& f,
                                                       const MultiplicativeRule& g,
                                                       const std::vector<std::uint64_t>& points);

struct GrowthRow {
    std::uint64_t x;
    std::int64_t m;
    double ratio;  // |M_g(x)| / (log x)^omega(q)
};

struct GrowthReport {
    std::vector<GrowthRow> rows;  // every checkpoint x >= 2
    unsigned omega_q = 0;
    double max_ratio = 0.0;       // over checkpoints in [x_min, X]
    std::uint64_t arg_max = 0;
    // max_y |M_chi(y)| / omega(q)! * prod_{p | q} 1 / log p
    double limiting_bound = 0.0;
};

GrowthReport growth_report_g(const MultiplicativeRule& g, const RealCharacter& chi,
                             std::uint64_t limit, const CheckpointSchedule& schedule,
                             std::uint64_t x_min = 1000, const SummationOptions& options = {});

// Same report from an already computed M_g series.
GrowthReport growth_report_from_series(const PartialSumSeries& series, const RealCharacter& chi,
                                       std::uint64_t x_min = 1000);

void write_growth_csv(const GrowthReport& report, std::ostream& out);

} // namespace kfree
