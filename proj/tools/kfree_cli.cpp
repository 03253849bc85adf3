// kfree_cli: command-line front end for the kfree library.

#include "kfree/analysis.hpp"
#include "kfree/errors.hpp"
#include "kfree/format.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace kfree;

namespace {

struct CommonOptions {
    std::uint64_t modulus = 3;
    unsigned k = 2;
    std::uint64_t limit = 0;
    std::string plan;
    std::string out;
    unsigned threads = 1;
    double schedule = 1.05;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_limit = true)
{
    cmd->add_option("--modulus,-q", o.modulus, "modulus of the real character")->capture_default_str();
    cmd->add_option("--k", o.k, "k of the k-free restriction (2..60)")->capture_default_str();
    auto* lim = cmd->add_option("--limit,-X", o.limit, "upper limit X");
    if (needs_limit)
        lim->required();
    cmd->add_option("--plan", o.plan, "plan JSON file, or 'empty' / 'character'");
    cmd->add_option("--out,-o", o.out, "output file or directory (stdout when omitted)");
    cmd->add_option("--threads", o.threads, "worker threads for segmented sums")->capture_default_str();
    cmd->add_option("--schedule", o.schedule, "geometric checkpoint ratio")->capture_default_str();
}

SummationOptions summation(const CommonOptions& o)
{
    SummationOptions s;
    s.threads = o.threads == 0 ? 1 : o.threads;
    return s;
}

CheckpointSchedule schedule_of(const CommonOptions& o)
{
    return CheckpointSchedule::geometric(o.schedule);
}

ModificationPlan plan_of(const CommonOptions& o)
{
    const auto chi = build_real_character(o.modulus);
    if (o.plan.empty() || o.plan == "empty")
        return ModificationPlan::empty(chi, true);
    if (o.plan == "character")
        return ModificationPlan::empty(chi, false);
    auto plan = load_plan(o.plan);
    if (plan.base.modulus() != o.modulus)
        throw ValidationError("plan modulus " + std::to_string(plan.base.modulus()) +
                              " differs from --modulus " + std::to_string(o.modulus));
    return plan;
}

// Runs `write` against the --out file, or stdout when none was given.
template <typename F>
void emit(const std::string& path, F&& write)
{
    if (path.empty()) {
        write(std::cout);
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write " + path);
    write(out);
}

MultiplicativeRule function_rule(const std::string& name, const CommonOptions& o)
{
    const auto plan = plan_of(o);
    const auto chi = plan.base;
    if (name == "f")
        return modified_g(plan).restricted_to_kfree(o.k);
    if (name == "g")
        return modified_g(plan);
    if (name == "mu")
        return MultiplicativeRule::mobius();
    if (name == "mu_chi")
        return MultiplicativeRule::mobius() * MultiplicativeRule::character(chi);
    if (name == "chi")
        return MultiplicativeRule::character(chi);
    if (name == "kfree")
        return MultiplicativeRule::constant_one().restricted_to_kfree(o.k);
    if (name == "one")
        return MultiplicativeRule::constant_one();
    throw ValidationError("unknown function '" + name + "'");
}

HyperbolaSplit parse_split(const std::string& text, std::uint64_t x, unsigned k)
{
    if (text == "theorem2")
        return theorem2_split(x, k);
    if (text == "balanced")
        return HyperbolaSplit::balanced(x);
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ValidationError("split must be theorem2, balanced or U,V");
    return HyperbolaSplit::from_reals(x, std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact partial sums of multiplicative functions on k-free integers"};
    app.require_subcommand(1);

    // sieve
    CommonOptions sieve_o;
    std::string sieve_kind = "mobius";
    std::uint64_t sieve_lo = 1;
    auto* sieve_cmd = app.add_subcommand("sieve", "tabulate primes, mu, mu_k^2, a character or spf");
    add_common(sieve_cmd, sieve_o);
    sieve_cmd->add_option("--kind", sieve_kind, "primes | mobius | kfree | character | spf")
        ->capture_default_str();
    sieve_cmd->add_option("--lo", sieve_lo, "first n of the segment")->capture_default_str();

    // sum
    CommonOptions sum_o;
    std::string sum_function = "f";
    auto* sum_cmd = app.add_subcommand("sum", "checkpointed partial sums M(x) as CSV x,M,abs_max");
    add_common(sum_cmd, sum_o);
    sum_cmd->add_option("--function", sum_function, "f | g | mu | mu_chi | chi | kfree | one")
        ->capture_default_str();

    // mertens
    CommonOptions mertens_o;
    bool mertens_check = false;
    auto* mertens_cmd = app.add_subcommand("mertens", "Mertens function M(X)");
    add_common(mertens_cmd, mertens_o);
    mertens_cmd->add_flag("--check", mertens_check, "also run the recursive path and compare");

    // verify-budget
    CommonOptions budget_o;
    BudgetParams budget_p;
    bool budget_greedy = false;
    std::string budget_plan_out;
    auto* budget_cmd = app.add_subcommand("verify-budget", "check the prime deviation budget of a plan");
    add_common(budget_cmd, budget_o);
    budget_cmd->add_option("--C", budget_p.big_c, "budget constant C")->capture_default_str();
    budget_cmd->add_option("--c", budget_p.small_c, "budget decay constant c")->capture_default_str();
    budget_cmd->add_option("--x0", budget_p.x0, "first x checked")->capture_default_str();
    budget_cmd->add_flag("--greedy", budget_greedy, "build the greedy admissible plan and verify it");
    budget_cmd->add_option("--plan-out", budget_plan_out, "where to save the greedy plan");

    // distance
    CommonOptions dist_o;
    std::string dist_against = "chi";
    auto* dist_cmd = app.add_subcommand("distance", "pretentious distance D(g, chi; x)^2 at checkpoints");
    add_common(dist_cmd, dist_o);
    dist_cmd->add_option("--against", dist_against, "second function: chi | g")->capture_default_str();

    // fit
    CommonOptions fit_o;
    std::string fit_function = "f";
    std::uint64_t fit_x_min = kDefaultXMin;
    double fit_alpha = 0.0;
    auto* fit_cmd = app.add_subcommand("fit", "growth exponent of the running max of |M|");
    add_common(fit_cmd, fit_o);
    fit_cmd->add_option("--function", fit_function, "f | g | mu | mu_chi")->capture_default_str();
    fit_cmd->add_option("--x-min", fit_x_min, "smallest checkpoint used")->capture_default_str();
    fit_cmd->add_option("--alpha", fit_alpha, "also report the ratio against x^alpha");

    // figure1
    CommonOptions fig_o;
    auto* fig_cmd = app.add_subcommand("figure1", "partial sums of mu^2 chi_3 with +-x^(1/4) as CSV and SVG");
    add_common(fig_cmd, fig_o);

    // compare
    CommonOptions cmp_o;
    std::string cmp_split = "theorem2";
    auto* cmp_cmd = app.add_subcommand("compare", "direct summation against the hyperbola identity");
    add_common(cmp_cmd, cmp_o);
    cmp_cmd->add_option("--split", cmp_split, "theorem2 | balanced | U,V")->capture_default_str();

    // run
    std::string run_config;
    std::string run_out = "run";
    std::optional<unsigned> run_threads;
    auto* run_cmd = app.add_subcommand("run", "config-driven experiment bundle");
    run_cmd->add_option("config", run_config, "experiment config JSON")->required();
    run_cmd->add_option("--out,-o", run_out, "output directory")->capture_default_str();
    run_cmd->add_option("--threads", run_threads, "override the config's thread count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sieve_cmd) {
            const auto& o = sieve_o;
            if (sieve_kind == "primes") {
                const auto primes = sieve_primes(o.limit);
                emit(o.out, [&](std::ostream& out) {
                    out << "p\n";
                    for (auto p : primes)
                        if (p >= sieve_lo)
                            out << p << '\n';
                });
            } else if (sieve_kind == "spf") {
                const auto spf = build_spf(o.limit);
                emit(o.out, [&](std::ostream& out) {
                    out << "n,spf\n";
                    for (std::uint64_t n = std::max<std::uint64_t>(sieve_lo, 1); n <= o.limit; ++n)
                        out << n << ',' << spf(n) << '\n';
                });
            } else {
                DenseValueTable table;
                if (sieve_kind == "mobius")
                    table = sieve_mobius_segment(sieve_lo, o.limit);
                else if (sieve_kind == "kfree")
                    table = sieve_kfree_segment(sieve_lo, o.limit, o.k);
                else if (sieve_kind == "character")
                    table = character_table(build_real_character(o.modulus), sieve_lo, o.limit);
                else
                    throw ValidationError("unknown sieve kind '" + sieve_kind + "'");
                emit(o.out, [&](std::ostream& out) { write_table_csv(table, out); });
            }
        } else if (*sum_cmd) {
            const auto rule = function_rule(sum_function, sum_o);
            const auto series = direct_summatory(rule, sum_o.limit, schedule_of(sum_o), summation(sum_o));
            emit(sum_o.out, [&](std::ostream& out) { write_series_csv(series, out); });
        } else if (*mertens_cmd) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto m = mertens(mertens_o.limit, summation(mertens_o));
            std::cout << "M(" << mertens_o.limit << ") = " << m << "  [sieve " << format_real(seconds_since(t0))
                      << " s]\n";
            if (mertens_check) {
                const auto t1 = std::chrono::steady_clock::now();
                const auto r = mertens_recursive(mertens_o.limit);
                std::cout << "recursive = " << r << "  [" << format_real(seconds_since(t1)) << " s]\n";
                if (r != m) {
                    std::cerr << "error: the two Mertens paths disagree\n";
                    return 1;
                }
            }
        } else if (*budget_cmd) {
            budget_p.k = budget_o.k;
            budget_p.validate();
            const auto plan = budget_greedy
                                  ? greedy_admissible_plan(build_real_character(budget_o.modulus), budget_p,
                                                           budget_o.limit)
                                  : plan_of(budget_o);
            if (budget_greedy) {
                if (!budget_plan_out.empty())
                    save_plan(plan, budget_plan_out);
                std::cerr << "greedy plan flips " << plan.flipped_primes.size() << " primes\n";
            }
            const auto report =
                verify_condition1(modified_g(plan), plan.base, budget_p, budget_o.limit, schedule_of(budget_o));
            emit(budget_o.out, [&](std::ostream& out) { write_budget_csv(report, out); });
            std::cerr << (report.all_pass ? "budget holds at every checked x\n"
                                          : "budget violated first at x = " +
                                                std::to_string(*report.first_violation) + "\n");
        } else if (*dist_cmd) {
            const auto plan = plan_of(dist_o);
            const auto g = modified_g(plan);
            const auto other = dist_against == "g" ? g : MultiplicativeRule::character(plan.base);
            const auto points = schedule_of(dist_o).points(dist_o.limit);
            const auto series = pretentious_distance_series(g, other, points);
            emit(dist_o.out, [&](std::ostream& out) {
                out << "x,distance_squared\n";
                for (const auto& d : series)
                    out << d.x << ',' << format_real(d.distance_squared) << '\n';
            });
        } else if (*fit_cmd) {
            const auto rule = function_rule(fit_function, fit_o);
            const auto series = direct_summatory(rule, fit_o.limit, schedule_of(fit_o), summation(fit_o));
            const auto fit = fit_exponent(series, fit_x_min);
            emit(fit_o.out, [&](std::ostream& out) {
                out << "slope,intercept,x_min,residual,points\n"
                    << format_real(fit.slope) << ',' << format_real(fit.intercept) << ',' << fit.x_min << ','
                    << format_real(fit.residual) << ',' << fit.points << '\n';
            });
            if (fit_alpha > 0) {
                const auto r = envelope_ratio(series, EnvelopeSpec::power(fit_alpha), fit_x_min);
                std::cerr << "max |M(x)|/x^" << format_real(fit_alpha) << " = " << format_real(r.max_ratio)
                          << " at x = " << r.arg_max << '\n';
            }
        } else if (*fig_cmd) {
            if (fig_o.limit < 1000)
                throw ValidationError("figure1 needs --limit >= 1000");
            const fs::path dir = fig_o.out.empty() ? fs::path("figure1") : fs::path(fig_o.out);
            const auto result = figure1(fig_o.limit, dir / "figure1.csv", dir / "figure1.svg", schedule_of(fig_o),
                                        summation(fig_o));
            std::cout << "M(" << fig_o.limit << ") = " << result.series.final_value() << '\n';
            if (result.ratio)
                std::cout << "max |M(x)|/x^(1/4) over x >= 1000: " << format_real(result.ratio->max_ratio)
                          << " at x = " << result.ratio->arg_max << '\n';
            std::cout << "wrote " << (dir / "figure1.csv").string() << " and " << (dir / "figure1.svg").string()
                      << '\n';
        } else if (*cmp_cmd) {
            ExperimentConfig cfg;
            cfg.modulus = cmp_o.modulus;
            cfg.k = cmp_o.k;
            cfg.plan = plan_of(cmp_o);
            cfg.limit = cmp_o.limit;
            cfg.threads = cmp_o.threads;
            const auto report = compare_methods(cfg, cmp_o.limit, parse_split(cmp_split, cmp_o.limit, cmp_o.k));
            std::cout << "x = " << report.x << ", U = " << report.split.u_floor << ", V = " << report.split.v_floor
                      << '\n'
                      << "direct    " << report.direct << "  [" << format_real(report.direct_seconds) << " s]\n"
                      << "hyperbola " << report.hyperbola << "  [" << format_real(report.hyperbola_seconds)
                      << " s]\n";
        } else if (*run_cmd) {
            auto cfg = load_experiment_config(run_config);
            if (run_threads)
                cfg.threads = *run_threads;
            const auto bundle = run_experiment(cfg, run_out);
            for (const auto& f : bundle.files)
                std::cout << (bundle.directory / f).string() << '\n';
        }
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CorrectnessError& e) {
        std::cerr << "correctness failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
