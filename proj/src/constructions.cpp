#include "kfree/constructions.hpp"

#include "kfree/errors.hpp"
#include "kfree/format.hpp"
#include "kfree/intmath.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace kfree {

namespace {

class PlanSource final : public PrimeValueSource {
public:
    explicit PlanSource(ModificationPlan plan) : plan_(std::move(plan)) {}

    int at_prime(std::uint64_t p) const override
    {
        const auto& chi = plan_.base;
        if (chi.modulus() % p == 0)
            return plan_.unit_on_q_divisors ? 1 : 0;
        const int c = chi(p);
        return std::binary_search(plan_.flipped_primes.begin(), plan_.flipped_primes.end(), p) ? -c : c;
    }

private:
    ModificationPlan plan_;
};

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace

ModificationPlan ModificationPlan::empty(const RealCharacter& chi, bool unit_on_q_divisors)
{
    return ModificationPlan{chi, {}, unit_on_q_divisors};
}

void ModificationPlan::validate() const
{
    for (std::size_t i = 0; i < flipped_primes.size(); ++i) {
        const std::uint64_t p = flipped_primes[i];
        if (i > 0 && flipped_primes[i - 1] >= p)
            throw ValidationError("flipped primes must be strictly increasing");
        if (base.modulus() % p == 0)
            throw ValidationError("flipped prime " + std::to_string(p) + " divides the modulus " +
                                  std::to_string(base.modulus()));
        if (!is_prime_trial(p))
            throw ValidationError("flipped entry " + std::to_string(p) + " is not prime");
    }
}

std::size_t ModificationPlan::flipped_up_to(std::uint64_t x) const
{
    return static_cast<std::size_t>(
        std::upper_bound(flipped_primes.begin(), flipped_primes.end(), x) - flipped_primes.begin());
}

std::string plan_to_json(const ModificationPlan& plan)
{
    nlohmann::ordered_json j;
    j["modulus"] = plan.base.modulus();
    j["flipped_primes"] = plan.flipped_primes;
    j["unit_on_q_divisors"] = plan.unit_on_q_divisors;
    return j.dump(2) + "\n";
}

ModificationPlan plan_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("plan JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("modulus") || !j["modulus"].is_number_unsigned())
        throw ValidationError("plan JSON needs an unsigned integer 'modulus'");
    ModificationPlan plan = ModificationPlan::empty(build_real_character(j["modulus"].get<std::uint64_t>()));
    if (j.contains("flipped_primes")) {
        if (!j["flipped_primes"].is_array())
            throw ValidationError("plan JSON: 'flipped_primes' must be an array");
        for (const auto& p : j["flipped_primes"]) {
            if (!p.is_number_unsigned())
                throw ValidationError("plan JSON: flipped primes must be unsigned integers");
            plan.flipped_primes.push_back(p.get<std::uint64_t>());
        }
    }
    if (j.contains("unit_on_q_divisors")) {
        if (!j["unit_on_q_divisors"].is_boolean())
            throw ValidationError("plan JSON: 'unit_on_q_divisors' must be a boolean");
        plan.unit_on_q_divisors = j["unit_on_q_divisors"].get<bool>();
    }
    plan.validate();
    return plan;
}

ModificationPlan load_plan(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot read plan file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return plan_from_json(ss.str());
}

void save_plan(const ModificationPlan& plan, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write plan file " + path);
    out << plan_to_json(plan);
}

MultiplicativeRule modified_g(const ModificationPlan& plan)
{
    plan.validate();
    std::string label = "g(" + plan.base.name();
    if (!plan.flipped_primes.empty())
        label += ",flips=" + std::to_string(plan.flipped_primes.size());
    if (!plan.unit_on_q_divisors)
        label += ",zero_on_q";
    label += ")";
    return {std::make_shared<PlanSource>(plan), std::nullopt, label};
}

MultiplicativeRule theorem2_g(const RealCharacter& chi)
{
    return modified_g(ModificationPlan::empty(chi, true));
}

std::int64_t condition1_sum(const MultiplicativeRule& g, const RealCharacter& chi, std::uint64_t x)
{
    std::int64_t s = 0;
    for (std::uint64_t p : sieve_primes(x))
        s += std::abs(1 - g.prime_value(p) * chi(p));
    return s;
}

void BudgetParams::validate() const
{
    if (!(big_c > 0) || !(small_c > 0) || !std::isfinite(big_c) || !std::isfinite(small_c))
        throw ValidationError("budget constants C and c must be positive");
    check_k(k);
    if (x0 < 2)
        throw ValidationError("budget start x0 must be >= 2");
}

double BudgetParams::bound(std::uint64_t x) const
{
    const double xd = static_cast<double>(x);
    return big_c * std::pow(xd, 1.0 / k) * std::exp(-small_c * std::sqrt(std::log(xd)));
}

BudgetReport verify_condition1(const MultiplicativeRule& g, const RealCharacter& chi,
                               const BudgetParams& params, std::uint64_t limit,
                               const CheckpointSchedule& schedule)
{
    params.validate();
    if (limit < params.x0)
        throw ValidationError("verification limit is below x0");

    std::vector<std::uint64_t> points;
    for (auto x : schedule.points(limit))
        if (x >= params.x0)
            points.push_back(x);
    points.push_back(params.x0);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    const auto primes = sieve_primes(limit);
    BudgetReport report;
    std::int64_t s = 0;
    std::size_t pi = 0;
    for (auto x : points) {
        for (; pi < primes.size() && primes[pi] <= x; ++pi)
            s += std::abs(1 - g.prime_value(primes[pi]) * chi(primes[pi]));
        const double budget = params.bound(x);
        const bool pass = static_cast<double>(s) <= budget;
        report.rows.push_back({x, s, budget, pass});
        if (!pass && report.all_pass) {
            report.all_pass = false;
            report.first_violation = x;
        }
    }
    return report;
}

void write_budget_csv(const BudgetReport& report, std::ostream& out)
{
    out << "x,S,budget,pass\n";
    for (const auto& r : report.rows)
        out << r.x << ',' << r.s << ',' << format_real(r.budget) << ',' << (r.pass ? 1 : 0) << '\n';
}

ModificationPlan greedy_admissible_plan(const RealCharacter& chi, const BudgetParams& params,
                                        std::uint64_t limit)
{
    params.validate();
    if (limit < params.x0)
        throw ValidationError("greedy plan limit is below x0");
    const auto primes = sieve_primes(limit);
    const std::uint64_t q = chi.modulus();

    // log budget is convex in L = log x with its minimum at L* = (c k / 2)^2.
    const double l_star = std::pow(params.small_c * params.k / 2.0, 2);
    const double x_star = std::exp(l_star);
    auto min_bound = [&](std::uint64_t a, std::uint64_t b) {
        double best = std::min(params.bound(a), params.bound(b));
        if (x_star > static_cast<double>(a) && x_star < static_cast<double>(b)) {
            const auto centre = static_cast<std::uint64_t>(x_star);
            for (std::uint64_t y = centre > 0 ? centre - 1 : 0; y <= centre + 2; ++y)
                if (y >= a && y <= b)
                    best = std::min(best, params.bound(y));
        }
        return best;
    };

    // Pieces [start_i, start_{i+1} - 1] on which S is constant.
    std::vector<std::uint64_t> starts{params.x0};
    for (auto p : primes)
        if (p > params.x0)
            starts.push_back(p);
    std::vector<std::int64_t> cap(starts.size());
    std::int64_t forced = 0;
    std::size_t pi = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        for (; pi < primes.size() && primes[pi] <= starts[i]; ++pi)
            if (q % primes[pi] == 0)
                ++forced;
        const std::uint64_t end = (i + 1 < starts.size()) ? starts[i + 1] - 1 : limit;
        const double b = min_bound(starts[i], end);
        // Largest a with forced + 2a <= b, compared exactly.
        auto a = static_cast<std::int64_t>(std::floor((b - static_cast<double>(forced)) / 2.0));
        while (static_cast<double>(forced + 2 * a) > b)
            --a;
        while (static_cast<double>(forced + 2 * (a + 1)) <= b)
            ++a;
        cap[i] = a;
    }
    for (std::size_t i = cap.size(); i-- > 1;)
        cap[i - 1] = std::min(cap[i - 1], cap[i]);

    ModificationPlan plan = ModificationPlan::empty(chi, true);
    for (auto p : primes) {
        if (q % p == 0)
            continue;
        const std::uint64_t from = std::max(p, params.x0);
        const auto idx = static_cast<std::size_t>(
            std::upper_bound(starts.begin(), starts.end(), from) - starts.begin() - 1);
        if (static_cast<std::int64_t>(plan.flipped_primes.size()) + 1 <= cap[idx])
            plan.flipped_primes.push_back(p);
    }
    return plan;
}

double pretentious_distance_squared(const MultiplicativeRule& f, const MultiplicativeRule& g,
                                    std::uint64_t x)
{
    CompensatedSum sum;
    for (auto p : sieve_primes(x)) {
        const int term = 1 - f.prime_power_value(p, 1) * g.prime_power_value(p, 1);
        if (term != 0)
            sum.add(static_cast<double>(term) / static_cast<double>(p));
    }
    return sum.value();
}

double pretentious_distance(const MultiplicativeRule& f, const MultiplicativeRule& g, std::uint64_t x)
{
    return std::sqrt(pretentious_distance_squared(f, g, x));
}

std::vector<DistancePoint> pretentious_distance_series(const MultiplicativeRule& f,
                                                       const MultiplicativeRule& g,
                                                       const std::vector<std::uint64_t>& points)
{
    std::vector<DistancePoint> out;
    if (points.empty())
        return out;
    if (!std::is_sorted(points.begin(), points.end()))
        throw ValidationError("distance checkpoints must be ascending");
    const auto primes = sieve_primes(points.back());
    CompensatedSum sum;
    std::size_t pi = 0;
    for (auto x : points) {
        for (; pi < primes.size() && primes[pi] <= x; ++pi) {
            const auto p = primes[pi];
            const int term = 1 - f.prime_power_value(p, 1) * g.prime_power_value(p, 1);
            if (term != 0)
                sum.add(static_cast<double>(term) / static_cast<double>(p));
        }
        out.push_back({x, sum.value()});
    }
    return out;
}

GrowthReport growth_report_g(const MultiplicativeRule& g, const RealCharacter& chi, std::uint64_t limit,
                             const CheckpointSchedule& schedule, std::uint64_t x_min,
                             const SummationOptions& options)
{
    return growth_report_from_series(direct_summatory(g, limit, schedule, options), chi, x_min);
}

GrowthReport growth_report_from_series(const PartialSumSeries& series, const RealCharacter& chi,
                                       std::uint64_t x_min)
{
    GrowthReport report;
    const std::uint64_t q = chi.modulus();
    report.omega_q = omega(q);

    double factorial = 1.0;
    for (unsigned i = 2; i <= report.omega_q; ++i)
        factorial *= i;
    double inv_logs = 1.0;
    std::uint64_t rest = q;
    for (std::uint64_t p = 2; p <= rest; ++p) {
        if (rest % p == 0) {
            inv_logs /= std::log(static_cast<double>(p));
            while (rest % p == 0)
                rest /= p;
        }
    }
    report.limiting_bound = static_cast<double>(chi.max_abs_partial_sum()) / factorial * inv_logs;

    for (const auto& c : series.checkpoints) {
        if (c.x < 2)
            continue;
        const double ratio = static_cast<double>(c.m < 0 ? -c.m : c.m) /
                             std::pow(std::log(static_cast<double>(c.x)), report.omega_q);
        report.rows.push_back({c.x, c.m, ratio});
        if (c.x >= x_min && ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.arg_max = c.x;
        }
    }
    return report;
}

void write_growth_csv(const GrowthReport& report, std::ostream& out)
{
    out << "x,M,ratio\n";
    for (const auto& r : report.rows)
        out << r.x << ',' << r.m << ',' << format_real(r.ratio) << '\n';
}

} // namespace kfree
