#include "kfree/analysis.hpp"

#include "kfree/errors.hpp"
#include "kfree/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace kfree {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string fixed2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::ofstream open_output(const fs::path& path)
{
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write " + path.string());
    return out;
}

void write_file(const fs::path& path, const std::string& content)
{
    auto out = open_output(path);
    out << content;
    if (!out)
        throw ValidationError("failed writing " + path.string());
}

// 1-based line of the first `"key" :` in text, 0 if absent.
int line_of_key(const std::string& text, const std::string& key)
{
    const std::string quoted = "\"" + key + "\"";
    for (std::size_t pos = text.find(quoted); pos != std::string::npos;
         pos = text.find(quoted, pos + 1)) {
        std::size_t after = pos + quoted.size();
        while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after])))
            ++after;
        if (after < text.size() && text[after] == ':')
            return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
    }
    return 0;
}

int line_of_byte(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::int64_t hyperbola_value(const ExperimentConfig& config, std::uint64_t x, const HyperbolaSplit& split)
{
    const auto g = config_g(config);
    const auto h = closed_form_h_oracle(config.k, g, x);
    const auto gtable = TableOracle::from_rule(g, x);
    return hyperbola_sum(h, gtable, split);
}

ojson envelope_json(const EnvelopeSpec& env)
{
    ojson j;
    switch (env.kind) {
    case EnvelopeSpec::Kind::power:
        j["kind"] = "power";
        j["alpha"] = env.alpha;
        break;
    case EnvelopeSpec::Kind::theorem1:
        j["kind"] = "theorem1";
        j["k"] = env.k;
        j["lambda"] = env.lambda;
        break;
    case EnvelopeSpec::Kind::mobius:
        j["kind"] = "mobius";
        j["c"] = env.c;
        break;
    }
    j["scale"] = env.scale;
    return j;
}

} // namespace

// ---------------------------------------------------------------------------
// Envelopes and fits

EnvelopeSpec EnvelopeSpec::power(double alpha, double scale)
{
    EnvelopeSpec e;
    e.kind = Kind::power;
    e.alpha = alpha;
    e.scale = scale;
    e.validate();
    return e;
}

EnvelopeSpec EnvelopeSpec::theorem1(unsigned k, double lambda, double scale)
{
    EnvelopeSpec e;
    e.kind = Kind::theorem1;
    e.k = k;
    e.lambda = lambda;
    e.scale = scale;
    e.validate();
    return e;
}

EnvelopeSpec EnvelopeSpec::mobius(double c, double scale)
{
    EnvelopeSpec e;
    e.kind = Kind::mobius;
    e.c = c;
    e.scale = scale;
    e.validate();
    return e;
}

void EnvelopeSpec::validate() const
{
    auto positive = [](double v) { return v > 0 && std::isfinite(v); };
    if (!positive(scale))
        throw ValidationError("envelope scale must be positive");
    switch (kind) {
    case Kind::power:
        if (!positive(alpha))
            throw ValidationError("power envelope needs alpha > 0");
        break;
    case Kind::theorem1:
        check_k(k);
        if (!positive(lambda))
            throw ValidationError("theorem1 envelope needs lambda > 0");
        break;
    case Kind::mobius:
        if (!positive(c))
            throw ValidationError("mobius envelope needs c > 0");
        break;
    }
}

double EnvelopeSpec::operator()(std::uint64_t x) const
{
    const double xd = static_cast<double>(x);
    const double lx = std::log(xd);
    switch (kind) {
    case Kind::power:
        return scale * std::pow(xd, alpha);
    case Kind::theorem1:
        return scale * std::pow(xd, 1.0 / k) / std::exp(lambda * std::pow(lx, 0.25));
    case Kind::mobius:
        return scale * xd / std::exp(c * std::sqrt(lx));
    }
    return 0.0;
}

std::string EnvelopeSpec::describe() const
{
    std::string s;
    switch (kind) {
    case Kind::power:
        s = "power(alpha=" + format_real(alpha) + ")";
        break;
    case Kind::theorem1:
        s = "theorem1(k=" + std::to_string(k) + ";lambda=" + format_real(lambda) + ")";
        break;
    case Kind::mobius:
        s = "mobius(c=" + format_real(c) + ")";
        break;
    }
    if (scale != 1.0)
        s = format_real(scale) + "*" + s;
    return s;
}

EnvelopeRatio envelope_ratio(const PartialSumSeries& series, const EnvelopeSpec& env, std::uint64_t x_min)
{
    env.validate();
    EnvelopeRatio best;
    bool any = false;
    for (const auto& c : series.checkpoints) {
        if (c.x < x_min)
            continue;
        const double ratio = static_cast<double>(c.m < 0 ? -c.m : c.m) / env(c.x);
        if (!any || ratio > best.max_ratio) {
            best = {ratio, c.x};
            any = true;
        }
    }
    if (!any)
        throw ValidationError(series.label + ": no checkpoint at or above x_min=" + std::to_string(x_min));
    return best;
}

ExponentFit fit_exponent(const PartialSumSeries& series, std::uint64_t x_min)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& c : series.checkpoints) {
        if (c.x < x_min || c.abs_max <= 0)
            continue;
        xs.push_back(std::log(static_cast<double>(c.x)));
        ys.push_back(std::log(static_cast<double>(c.abs_max)));
    }
    if (xs.size() < 10)
        throw FitError(series.label + ": only " + std::to_string(xs.size()) +
                       " nonzero checkpoints at or above x_min, need 10");

    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0)
        throw FitError(series.label + ": checkpoints do not span a range of x");

    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.x_min = x_min;
    fit.points = xs.size();
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

// ---------------------------------------------------------------------------
// Figure

FigureResult figure1_series(std::uint64_t limit, const CheckpointSchedule& schedule,
                            const SummationOptions& options)
{
    const auto chi = build_real_character(3);
    auto rule = MultiplicativeRule::character(chi).restricted_to_kfree(2);
    FigureResult result{direct_summatory(rule, limit, schedule, options), std::nullopt};
    result.series.label = "mu^2*chi_3";
    if (limit >= kDefaultXMin)
        result.ratio = envelope_ratio(result.series, EnvelopeSpec::power(0.25), kDefaultXMin);
    return result;
}

void write_figure1_csv(const PartialSumSeries& series, std::ostream& out)
{
    out << "x,M,lower,upper\n";
    for (const auto& c : series.checkpoints) {
        const double env = std::pow(static_cast<double>(c.x), 0.25);
        out << c.x << ',' << c.m << ',' << format_real(-env) << ',' << format_real(env) << '\n';
    }
}

std::string render_figure1_svg(const PartialSumSeries& series)
{
    constexpr double width = 900, height = 500;
    constexpr double left = 70, right = 20, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const auto& pts = series.checkpoints;
    const double x_lo = pts.empty() ? 0.0 : std::log10(static_cast<double>(pts.front().x));
    double x_hi = pts.empty() ? 1.0 : std::log10(static_cast<double>(pts.back().x));
    if (x_hi <= x_lo)
        x_hi = x_lo + 1.0;
    double y_max = 1.0;
    for (const auto& c : pts) {
        y_max = std::max(y_max, static_cast<double>(c.m < 0 ? -c.m : c.m));
        y_max = std::max(y_max, std::pow(static_cast<double>(c.x), 0.25));
    }
    y_max *= 1.05;

    auto px = [&](std::uint64_t x) {
        return left + (std::log10(static_cast<double>(x)) - x_lo) / (x_hi - x_lo) * plot_w;
    };
    auto py = [&](double y) { return top + (y_max - y) / (2 * y_max) * plot_h; };
    auto polyline = [&](auto value_of, const char* style) {
        std::string s = "  <polyline fill=\"none\" " + std::string(style) + " points=\"";
        bool first = true;
        for (const auto& c : pts) {
            if (!first)
                s += ' ';
            first = false;
            s += fixed2(px(c.x)) + "," + fixed2(py(value_of(c)));
        }
        return s + "\"/>\n";
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"500\" viewBox=\"0 0 900 500\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"900\" height=\"500\" fill=\"white\"/>\n";
    svg += "  <text x=\"" + fixed2(left) + "\" y=\"20\" font-size=\"14\">partial sums of " +
           series.label + " with +/- x^(1/4)</text>\n";
    // axes: x axis at y = 0, y axis at the left edge
    svg += "  <line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(py(0)) + "\" x2=\"" +
           fixed2(left + plot_w) + "\" y2=\"" + fixed2(py(0)) + "\" stroke=\"#888\"/>\n";
    svg += "  <line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top) + "\" x2=\"" + fixed2(left) +
           "\" y2=\"" + fixed2(top + plot_h) + "\" stroke=\"#888\"/>\n";
    for (int e = static_cast<int>(std::ceil(x_lo)); e <= static_cast<int>(std::floor(x_hi)); ++e) {
        const double xp = left + (e - x_lo) / (x_hi - x_lo) * plot_w;
        svg += "  <text x=\"" + fixed2(xp) + "\" y=\"" + fixed2(height - 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">1e" + std::to_string(e) + "</text>\n";
    }
    for (double frac : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const double y = frac * y_max / 1.05;
        svg += "  <text x=\"" + fixed2(left - 8) + "\" y=\"" + fixed2(py(y) + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + format_real(y) + "</text>\n";
    }
    svg += polyline([](const Checkpoint& c) { return static_cast<double>(c.m); },
                    "stroke=\"black\" stroke-width=\"1\"");
    svg += polyline([](const Checkpoint& c) { return -std::pow(static_cast<double>(c.x), 0.25); },
                    "stroke=\"#1f4e9c\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    svg += polyline([](const Checkpoint& c) { return std::pow(static_cast<double>(c.x), 0.25); },
                    "stroke=\"#1f4e9c\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    svg += "</svg>\n";
    return svg;
}

FigureResult figure1(std::uint64_t limit, const fs::path& csv_path, const fs::path& svg_path,
                     const CheckpointSchedule& schedule, const SummationOptions& options)
{
    auto result = figure1_series(limit, schedule, options);
    std::ostringstream csv;
    write_figure1_csv(result.series, csv);
    write_file(csv_path, csv.str());
    write_file(svg_path, render_figure1_svg(result.series));
    return result;
}

// ---------------------------------------------------------------------------
// Configs

HyperbolaSplit SplitPolicy::resolve(std::uint64_t x, unsigned k) const
{
    switch (kind) {
    case Kind::theorem2:
        return theorem2_split(x, k);
    case Kind::balanced:
        return HyperbolaSplit::balanced(x);
    case Kind::explicit_uv:
        return HyperbolaSplit::from_reals(x, u, v);
    }
    return theorem2_split(x, k);
}

std::string SplitPolicy::describe() const
{
    switch (kind) {
    case Kind::theorem2:
        return "theorem2";
    case Kind::balanced:
        return "balanced";
    case Kind::explicit_uv:
        return "U=" + format_real(u) + ",V=" + format_real(v);
    }
    return "";
}

ExperimentConfig parse_experiment_config(const std::string& text, const fs::path& base_dir)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what(), line_of_byte(text, e.byte));
    }
    if (!j.is_object())
        throw SchemaError("config must be a JSON object", 1);

    auto fail = [&](const std::string& key, const std::string& msg) -> SchemaError {
        return SchemaError("'" + key + "': " + msg, line_of_key(text, key));
    };
    static const std::set<std::string> known{"modulus", "q", "k", "plan", "X", "budget", "envelopes",
                                             "split", "schedule", "threads", "x_min", "fit_x_min"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw fail(key, "unknown key");

    auto get_uint = [&](const nlohmann::json& obj, const std::string& key, std::uint64_t min_value) {
        const auto& v = obj.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 && !v.is_number_unsigned()))
            throw fail(key, "must be a non-negative integer");
        const auto u = v.get<std::uint64_t>();
        if (u < min_value)
            throw fail(key, "must be >= " + std::to_string(min_value));
        return u;
    };
    auto get_real = [&](const nlohmann::json& obj, const std::string& key) {
        const auto& v = obj.at(key);
        if (!v.is_number())
            throw fail(key, "must be a number");
        const double d = v.get<double>();
        if (!(d > 0) || !std::isfinite(d))
            throw fail(key, "must be positive");
        return d;
    };

    ExperimentConfig cfg;
    if (j.contains("modulus") && j.contains("q"))
        throw fail("q", "give either 'modulus' or 'q', not both");
    const std::string mod_key = j.contains("q") ? "q" : "modulus";
    if (j.contains(mod_key))
        cfg.modulus = get_uint(j, mod_key, 3);
    RealCharacter chi = build_real_character(3);
    try {
        chi = build_real_character(cfg.modulus);
    } catch (const ConstructionError& e) {
        throw fail(mod_key, e.what());
    }

    if (!j.contains("k"))
        throw SchemaError("missing required key 'k'", 0);
    {
        const auto k = get_uint(j, "k", 2);
        if (k > kMaxK)
            throw fail("k", "must be <= 60");
        cfg.k = static_cast<unsigned>(k);
    }
    if (!j.contains("X"))
        throw SchemaError("missing required key 'X'", 0);
    cfg.limit = get_uint(j, "X", 1);
    if (cfg.limit > SummationOptions{}.max_limit)
        throw fail("X", "exceeds the summation budget");

    cfg.plan = ModificationPlan::empty(chi, true);
    cfg.plan_source = "empty";
    if (j.contains("plan") && !j["plan"].is_null()) {
        const auto& p = j["plan"];
        try {
            if (p.is_string() && p.get<std::string>() == "empty") {
                // default
            } else if (p.is_string() && p.get<std::string>() == "character") {
                cfg.plan = ModificationPlan::empty(chi, false);
                cfg.plan_source = "character";
            } else if (p.is_string()) {
                fs::path path = p.get<std::string>();
                if (path.is_relative())
                    path = base_dir / path;
                cfg.plan = load_plan(path.string());
                cfg.plan_source = p.get<std::string>();
            } else if (p.is_object()) {
                nlohmann::json full = p;
                if (!full.contains("modulus"))
                    full["modulus"] = cfg.modulus;
                cfg.plan = plan_from_json(full.dump());
                cfg.plan_source = "inline";
            } else {
                throw fail("plan", "must be \"empty\", \"character\", a plan path or a plan object");
            }
        } catch (const ValidationError& e) {
            throw fail("plan", e.what());
        } catch (const ConstructionError& e) {
            throw fail("plan", e.what());
        }
        if (cfg.plan.base.modulus() != cfg.modulus)
            throw fail("plan", "plan modulus " + std::to_string(cfg.plan.base.modulus()) +
                                   " differs from config modulus " + std::to_string(cfg.modulus));
    }

    cfg.budget.k = cfg.k;
    if (j.contains("budget")) {
        const auto& b = j["budget"];
        if (!b.is_object())
            throw fail("budget", "must be an object {C, c, x0}");
        for (const auto& [key, _] : b.items())
            if (key != "C" && key != "c" && key != "x0")
                throw fail(key, "unknown budget key");
        if (b.contains("C"))
            cfg.budget.big_c = get_real(b, "C");
        if (b.contains("c"))
            cfg.budget.small_c = get_real(b, "c");
        if (b.contains("x0"))
            cfg.budget.x0 = get_uint(b, "x0", 2);
    }
    if (cfg.limit < cfg.budget.x0)
        throw fail("X", "must be >= budget x0 = " + std::to_string(cfg.budget.x0));

    if (j.contains("envelopes")) {
        const auto& arr = j["envelopes"];
        if (!arr.is_array())
            throw fail("envelopes", "must be an array");
        for (const auto& e : arr) {
            if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string())
                throw fail("envelopes", "each envelope needs a string 'kind'");
            const auto kind = e["kind"].get<std::string>();
            const double scale = e.contains("scale") ? get_real(e, "scale") : 1.0;
            if (kind == "power") {
                if (!e.contains("alpha"))
                    throw fail("envelopes", "power envelope needs 'alpha'");
                cfg.envelopes.push_back(EnvelopeSpec::power(get_real(e, "alpha"), scale));
            } else if (kind == "theorem1") {
                const auto k = e.contains("k") ? get_uint(e, "k", 2) : cfg.k;
                if (k > kMaxK)
                    throw fail("k", "must be <= 60");
                const double lambda = e.contains("lambda") ? get_real(e, "lambda") : 1.0;
                cfg.envelopes.push_back(EnvelopeSpec::theorem1(static_cast<unsigned>(k), lambda, scale));
            } else if (kind == "mobius") {
                const double c = e.contains("c") ? get_real(e, "c") : 1.0;
                cfg.envelopes.push_back(EnvelopeSpec::mobius(c, scale));
            } else {
                throw fail("kind", "unknown envelope kind '" + kind + "'");
            }
        }
    } else {
        cfg.envelopes.push_back(EnvelopeSpec::power(1.0 / (2.0 * cfg.k)));
        cfg.envelopes.push_back(EnvelopeSpec::power(1.0 / cfg.k));
    }

    if (j.contains("split")) {
        const auto& s = j["split"];
        if (s.is_string() && s.get<std::string>() == "theorem2") {
            cfg.split.kind = SplitPolicy::Kind::theorem2;
        } else if (s.is_string() && s.get<std::string>() == "balanced") {
            cfg.split.kind = SplitPolicy::Kind::balanced;
        } else if (s.is_object() && s.contains("U") && s.contains("V")) {
            cfg.split.kind = SplitPolicy::Kind::explicit_uv;
            cfg.split.u = get_real(s, "U");
            cfg.split.v = get_real(s, "V");
            try {
                cfg.split.resolve(cfg.limit, cfg.k);
            } catch (const ValidationError& e) {
                throw fail("split", e.what());
            }
        } else {
            throw fail("split", "must be \"theorem2\", \"balanced\" or {\"U\": .., \"V\": ..}");
        }
    }

    if (j.contains("schedule")) {
        cfg.schedule_ratio = get_real(j, "schedule");
        if (cfg.schedule_ratio <= 1.0)
            throw fail("schedule", "ratio must be > 1");
    }
    if (j.contains("threads"))
        cfg.threads = static_cast<unsigned>(get_uint(j, "threads", 1));
    if (j.contains("x_min"))
        cfg.x_min = get_uint(j, "x_min", 1);
    if (j.contains("fit_x_min"))
        cfg.fit_x_min = get_uint(j, "fit_x_min", 1);
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SchemaError("cannot read config file " + path.string(), 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str(), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

MultiplicativeRule config_g(const ExperimentConfig& config)
{
    return modified_g(config.plan);
}

MultiplicativeRule config_f(const ExperimentConfig& config)
{
    return config_g(config).restricted_to_kfree(config.k);
}

CompareReport compare_methods(const ExperimentConfig& config, std::uint64_t x, const HyperbolaSplit& split)
{
    if (split.x != x)
        throw ValidationError("split was built for a different x");
    using clock = std::chrono::steady_clock;
    CompareReport report;
    report.x = x;
    report.split = split;

    SummationOptions opts;
    opts.threads = config.threads;
    auto t0 = clock::now();
    report.direct = direct_summatory(config_f(config), x, CheckpointSchedule::explicit_points({x}), opts)
                        .final_value();
    auto t1 = clock::now();
    report.hyperbola = hyperbola_value(config, x, split);
    auto t2 = clock::now();
    report.direct_seconds = std::chrono::duration<double>(t1 - t0).count();
    report.hyperbola_seconds = std::chrono::duration<double>(t2 - t1).count();

    if (report.direct != report.hyperbola)
        throw CorrectnessError("hyperbola sum " + std::to_string(report.hyperbola) +
                               " differs from direct sum " + std::to_string(report.direct) + " at x=" +
                               std::to_string(x));
    return report;
}

// ---------------------------------------------------------------------------
// Runner

RunBundle run_experiment(const ExperimentConfig& config, const fs::path& out_dir)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw ValidationError("cannot create output directory " + out_dir.string());

    RunBundle bundle;
    bundle.directory = out_dir;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(out_dir / name, content);
        bundle.files.push_back(name);
    };

    const auto schedule = CheckpointSchedule::geometric(config.schedule_ratio);
    SummationOptions opts;
    opts.threads = config.threads;
    const auto& chi = config.plan.base;
    const auto g = config_g(config);
    const auto f = config_f(config);

    const auto series_f = direct_summatory(f, config.limit, schedule, opts);
    const auto series_g = direct_summatory(g, config.limit, schedule, opts);
    {
        std::ostringstream s;
        write_series_csv(series_f, s);
        emit("series_f.csv", s.str());
    }
    {
        std::ostringstream s;
        write_series_csv(series_g, s);
        emit("series_g.csv", s.str());
    }

    const auto budget = verify_condition1(g, chi, config.budget, config.limit, schedule);
    {
        std::ostringstream s;
        write_budget_csv(budget, s);
        emit("budget.csv", s.str());
    }

    ojson summary;
    summary["schema_version"] = kSummarySchemaVersion;
    ojson cfg;
    cfg["modulus"] = config.modulus;
    cfg["k"] = config.k;
    cfg["plan"] = config.plan_source;
    cfg["X"] = config.limit;
    cfg["budget"] = {{"C", config.budget.big_c}, {"c", config.budget.small_c}, {"x0", config.budget.x0}};
    cfg["split"] = config.split.describe();
    cfg["schedule"] = {{"kind", "geometric"}, {"ratio", config.schedule_ratio}, {"start", 10},
                       {"powers_of_ten", true}};
    cfg["x_min"] = config.x_min;
    cfg["fit_x_min"] = config.fit_x_min;
    summary["config"] = cfg;
    summary["character"] = {{"name", chi.name()}, {"discriminant", chi.discriminant()}};
    summary["plan"] = {{"flipped_primes", config.plan.flipped_primes},
                       {"unit_on_q_divisors", config.plan.unit_on_q_divisors}};
    summary["functions"] = {{"f", f.label()}, {"g", g.label()}};
    summary["checkpoints"] = series_f.checkpoints.size();
    summary["M_f"] = series_f.final_value();
    summary["M_g"] = series_g.final_value();
    summary["max_abs_M_f"] = series_f.checkpoints.back().abs_max;
    summary["budget"] = {{"all_pass", budget.all_pass},
                         {"first_violation", budget.first_violation ? ojson(*budget.first_violation) : ojson()},
                         {"rows", budget.rows.size()}};

    {
        std::ostringstream s;
        s << "envelope,x_min,max_ratio,arg_max\n";
        ojson envs = ojson::array();
        for (const auto& env : config.envelopes) {
            ojson e = envelope_json(env);
            try {
                const auto r = envelope_ratio(series_f, env, config.x_min);
                s << env.describe() << ',' << config.x_min << ',' << format_real(r.max_ratio) << ','
                  << r.arg_max << '\n';
                e["max_ratio"] = r.max_ratio;
                e["arg_max"] = r.arg_max;
            } catch (const ValidationError&) {
                s << env.describe() << ',' << config.x_min << ",,\n";
                e["max_ratio"] = nullptr;
                e["error"] = "empty window";
            }
            envs.push_back(e);
        }
        emit("envelopes.csv", s.str());
        summary["envelopes"] = envs;
    }

    {
        std::ostringstream s;
        s << "slope,intercept,x_min,residual,points\n";
        try {
            const auto fit = fit_exponent(series_f, config.fit_x_min);
            s << format_real(fit.slope) << ',' << format_real(fit.intercept) << ',' << fit.x_min << ','
              << format_real(fit.residual) << ',' << fit.points << '\n';
            summary["fit"] = {{"slope", fit.slope},       {"intercept", fit.intercept},
                              {"x_min", fit.x_min},       {"residual", fit.residual},
                              {"points", fit.points},     {"conjectured_slope", 1.0 / (2.0 * config.k)}};
        } catch (const FitError& e) {
            s << ",,," << config.fit_x_min << ",,0\n";
            summary["fit"] = {{"error", e.what()}};
        }
        emit("fit.csv", s.str());
    }

    if (config.plan.flipped_primes.empty() && config.plan.unit_on_q_divisors) {
        const auto growth = growth_report_from_series(series_g, chi, config.x_min);
        std::ostringstream s;
        write_growth_csv(growth, s);
        emit("growth.csv", s.str());
        summary["growth"] = {{"omega_q", growth.omega_q},
                             {"max_ratio", growth.max_ratio},
                             {"arg_max", growth.arg_max},
                             {"limiting_bound", growth.limiting_bound}};
    }

    if (config.limit <= kRunHyperbolaLimit) {
        const auto split = config.split.resolve(config.limit, config.k);
        const auto value = hyperbola_value(config, config.limit, split);
        if (value != series_f.final_value())
            throw CorrectnessError("hyperbola sum disagrees with direct summation at X");
        summary["hyperbola"] = {{"split", config.split.describe()},
                                {"U_floor", split.u_floor},
                                {"V_floor", split.v_floor},
                                {"direct", series_f.final_value()},
                                {"hyperbola", value},
                                {"equal", true}};
    } else {
        summary["hyperbola"] = {{"skipped", "X above " + std::to_string(kRunHyperbolaLimit)}};
    }

    emit("plan.json", plan_to_json(config.plan));
    bundle.summary_json = summary.dump(2) + "\n";
    emit("summary.json", bundle.summary_json);
    return bundle;
}

RunBundle run_experiment(const fs::path& config_path, const fs::path& out_dir)
{
    return run_experiment(load_experiment_config(config_path), out_dir);
}

} // namespace kfree
