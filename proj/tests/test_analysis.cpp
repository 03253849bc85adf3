#include "kfree/analysis.hpp"
#include "kfree/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kfree;
namespace fs = std::filesystem;

namespace {

PartialSumSeries synthetic(std::uint64_t limit, auto m_of)
{
    PartialSumSeries s;
    s.label = "synthetic";
    std::int64_t running = 0;
    for (auto x : CheckpointSchedule::geometric().points(limit)) {
        const std::int64_t m = m_of(x);
        running = std::max(running, m < 0 ? -m : m);
        s.checkpoints.push_back({x, m, running});
    }
    return s;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("kfree_test_" + name);
    fs::remove_all(p);
    return p;
}

int schema_line(const std::string& text)
{
    try {
        parse_experiment_config(text);
    } catch (const SchemaError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("envelope_ratio examples")
{
    const auto zero = synthetic(100'000, [](std::uint64_t) { return 0; });
    CHECK(envelope_ratio(zero, EnvelopeSpec::power(0.25)).max_ratio == 0.0);
    const auto ident = synthetic(100'000, [](std::uint64_t x) { return static_cast<std::int64_t>(x); });
    CHECK(envelope_ratio(ident, EnvelopeSpec::power(1.0)).max_ratio == doctest::Approx(1.0));
    CHECK_THROWS_AS(envelope_ratio(ident, EnvelopeSpec::power(1.0), 200'000), ValidationError);

    const auto sq = synthetic(100'000, [](std::uint64_t x) { return static_cast<std::int64_t>(std::sqrt(x)); });
    const auto r1 = envelope_ratio(sq, EnvelopeSpec::power(0.25, 1.0));
    const auto r2 = envelope_ratio(sq, EnvelopeSpec::power(0.25, 2.0));
    CHECK(r2.max_ratio == r1.max_ratio / 2);
    CHECK(r2.arg_max == r1.arg_max);
}

TEST_CASE("envelope kinds")
{
    CHECK(EnvelopeSpec::power(0.5)(100) == doctest::Approx(10.0));
    CHECK(EnvelopeSpec::theorem1(2, 1.0)(10'000) ==
          doctest::Approx(100.0 / std::exp(std::pow(std::log(10'000.0), 0.25))));
    CHECK(EnvelopeSpec::mobius(1.0)(10'000) == doctest::Approx(10'000.0 / std::exp(std::sqrt(std::log(10'000.0)))));
    CHECK_THROWS_AS(EnvelopeSpec::power(0.0), ValidationError);
    CHECK_THROWS_AS(EnvelopeSpec::mobius(-1.0), ValidationError);
    CHECK_THROWS_AS(EnvelopeSpec::power(0.5, 0.0), ValidationError);
    for (auto e : {EnvelopeSpec::power(0.1), EnvelopeSpec::theorem1(3, 2.0), EnvelopeSpec::mobius(0.5)})
        for (std::uint64_t x : {2ULL, 10ULL, 1'000'000'000'000ULL}) {
            CHECK(e(x) > 0);
            CHECK(std::isfinite(e(x)));
        }
}

TEST_CASE("fit_exponent on synthetic series")
{
    const auto ident = synthetic(1'000'000, [](std::uint64_t x) { return static_cast<std::int64_t>(x); });
    CHECK(std::abs(fit_exponent(ident).slope - 1.0) < 0.001);
    const auto root = synthetic(1'000'000, [](std::uint64_t x) { return static_cast<std::int64_t>(std::sqrt(x)); });
    CHECK(std::abs(fit_exponent(root).slope - 0.5) < 0.02);
    for (double beta : {0.2, 0.25, 0.5}) {
        const auto s = synthetic(1'000'000, [&](std::uint64_t x) {
            return static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(x), beta)));
        });
        const auto fit = fit_exponent(s);
        CAPTURE(beta);
        CHECK(std::abs(fit.slope - beta) < 0.02);
        CHECK(fit.points >= 10);
    }
    const auto zero = synthetic(1'000'000, [](std::uint64_t) { return 0; });
    CHECK_THROWS_AS(fit_exponent(zero), FitError);
    CHECK_THROWS_AS(fit_exponent(ident, 900'000), FitError);
}

TEST_CASE("figure1 outputs")
{
    const auto small = figure1_series(10, CheckpointSchedule::geometric());
    CHECK(small.series.final_value() == 1);
    CHECK(!small.ratio);

    const auto dir = scratch("figure1");
    const auto res = figure1(100'000, dir / "f.csv", dir / "f.svg", CheckpointSchedule::geometric());
    const auto csv = slurp(dir / "f.csv");
    CHECK(csv.rfind("x,M,lower,upper\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == res.series.checkpoints.size() + 1);
    CHECK(csv.find('\r') == std::string::npos);

    const auto svg = slurp(dir / "f.svg");
    std::size_t polylines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 3);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    REQUIRE(res.ratio);
    CHECK(res.ratio->max_ratio < 1.0);

    CHECK_THROWS_AS(figure1(1000, "/proc/definitely/not/here.csv", dir / "g.svg", CheckpointSchedule::geometric()),
                    ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("config parsing")
{
    const auto cfg = parse_experiment_config(R"({"q": 3, "k": 2, "plan": "empty", "X": 1000000})");
    CHECK(cfg.modulus == 3);
    CHECK(cfg.k == 2);
    CHECK(cfg.limit == 1'000'000);
    CHECK(cfg.envelopes.size() == 2);
    CHECK(cfg.split.kind == SplitPolicy::Kind::theorem2);

    const auto full = parse_experiment_config(R"({
  "modulus": 5,
  "k": 3,
  "plan": {"flipped_primes": [2, 7]},
  "X": 50000,
  "budget": {"C": 4, "c": 0.5, "x0": 20},
  "envelopes": [{"kind": "power", "alpha": 0.2}, {"kind": "theorem1", "lambda": 2}, {"kind": "mobius", "c": 1, "scale": 3}],
  "split": {"U": 500, "V": 100},
  "schedule": 1.1,
  "threads": 2,
  "x_min": 100,
  "fit_x_min": 200
})");
    CHECK(full.plan.flipped_primes == std::vector<std::uint64_t>{2, 7});
    CHECK(full.budget.big_c == 4.0);
    CHECK(full.budget.k == 3);
    CHECK(full.envelopes.size() == 3);
    CHECK(full.envelopes[1].k == 3);
    CHECK(full.split.kind == SplitPolicy::Kind::explicit_uv);
    CHECK(full.schedule_ratio == 1.1);

    CHECK(parse_experiment_config(R"({"k": 2, "X": 100, "plan": "character"})").plan.unit_on_q_divisors == false);
}

TEST_CASE("config schema errors carry lines")
{
    CHECK(schema_line("{\n  \"q\": 3,\n  \"k\": 1,\n  \"X\": 100\n}") == 3);
    CHECK(schema_line("{\n  \"k\": 2,\n  \"X\": 100,\n  \"colour\": 1\n}") == 4);
    CHECK(schema_line("{\n  \"k\": 2,\n  \"X\": 100,\n  \"split\": \"diagonal\"\n}") == 4);
    CHECK(schema_line("{\n  \"k\": 2,\n  \"X\": 100,\n  \"modulus\": 9\n}") == 4);
    CHECK(schema_line("{\n  \"k\": 2,\n  \"X\": 100\n  \"oops\": 1\n}") == 4);
    CHECK(schema_line("{\"X\": 100}") == 0);
    CHECK(schema_line("{\n\"k\": 2,\n\"X\": 100,\n\"plan\": {\"flipped_primes\": [3]}}") == 4);
    CHECK_THROWS_AS(parse_experiment_config("[1, 2]"), SchemaError);
    CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), SchemaError);
}

TEST_CASE("compare_methods examples")
{
    auto cfg = parse_experiment_config(R"({"q": 3, "k": 2, "plan": "character", "X": 100000})");
    const auto chi = build_real_character(3);
    const auto direct = direct_summatory(MultiplicativeRule::character(chi).restricted_to_kfree(2), 100'000,
                                         CheckpointSchedule::explicit_points({100'000}))
                            .final_value();
    const auto r = compare_methods(cfg, 100'000, theorem2_split(100'000, 2));
    CHECK(r.direct == r.hyperbola);
    CHECK(r.direct == direct);
    CHECK(compare_methods(cfg, 10'000, HyperbolaSplit::from_reals(10'000, 100, 100)).direct ==
          direct_summatory(config_f(cfg), 10'000, CheckpointSchedule::explicit_points({10'000})).final_value());
    const auto v1 = compare_methods(cfg, 10, HyperbolaSplit::from_reals(10, 10, 1));
    CHECK(v1.direct == 1);
    CHECK(v1.hyperbola == 1);
    CHECK_THROWS_AS(compare_methods(cfg, 10, theorem2_split(11, 2)), ValidationError);
}

TEST_CASE("run_experiment bundle is complete and deterministic")
{
    const auto dir1 = scratch("run1");
    const auto dir2 = scratch("run2");
    const std::string text = R"({"q": 3, "k": 2, "plan": "empty", "X": 1000000})";
    auto cfg = parse_experiment_config(text);
    const auto b1 = run_experiment(cfg, dir1);
    cfg.threads = 4;
    const auto b2 = run_experiment(cfg, dir2);
    for (const char* name : {"series_f.csv", "series_g.csv", "budget.csv", "envelopes.csv", "fit.csv", "plan.json",
                             "summary.json", "growth.csv"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(dir1 / name));
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }
    CHECK(b1.files == b2.files);
    CHECK(b1.summary_json.find("\"schema_version\": \"1\"") != std::string::npos);
    CHECK(b1.summary_json.find("\"equal\": true") != std::string::npos);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("run_experiment resolves relative plan paths")
{
    const auto dir = scratch("runplan");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "plan.json") << R"({"modulus": 5, "flipped_primes": [2, 11], "unit_on_q_divisors": false})";
        std::ofstream(dir / "config.json") << R"({"modulus": 5, "k": 3, "plan": "plan.json", "X": 20000})";
    }
    const auto bundle = run_experiment(dir / "config.json", dir / "out");
    CHECK(slurp(dir / "out" / "plan.json").find("11") != std::string::npos);
    CHECK(!fs::exists(dir / "out" / "growth.csv"));
    CHECK(std::find(bundle.files.begin(), bundle.files.end(), "summary.json") != bundle.files.end());
    fs::remove_all(dir);
}
