// analysis.hpp
// Envelope ratios, exponent fits, the mu^2 chi_3 partial-sum figure, and the
// config-driven experiment runner that ties the modules together.

#pragma once

#include "kfree/constructions.hpp"
#include "kfree/summatory.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kfree {

inline constexpr std::uint64_t kDefaultXMin = 1000;
inline constexpr const char* kSummarySchemaVersion = "1";

// Reference curve env(x), multiplied by `scale`.
struct EnvelopeSpec {
    enum class Kind { power, theorem1, mobius };

    Kind kind = Kind::power;
    double alpha = 0.25;   // power: x^alpha
    unsigned k = 2;        // theorem1: x^(1/k) / exp(lambda (log x)^(1/4))
    double lambda = 1.0;
    double c = 1.0;        // mobius: x / exp(c sqrt(log x))
    double scale = 1.0;

    static EnvelopeSpec power(double alpha, double scale = 1.0);
    static EnvelopeSpec theorem1(unsigned k, double lambda, double scale = 1.0);
    static EnvelopeSpec mobius(double c, double scale = 1.0);

    void validate() const;
    double operator()(std::uint64_t x) const;
    std::string describe() const;
};

struct EnvelopeRatio {
    double max_ratio = 0.0;
    std::uint64_t arg_max = 0;
};

// max over checkpoints x >= x_min of |M(x)| / env(x). ValidationError if no
// checkpoint lies in the window.
EnvelopeRatio envelope_ratio(const PartialSumSeries& series, const EnvelopeSpec& env,
                             std::uint64_t x_min = kDefaultXMin);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::uint64_t x_min = 0;
    double residual = 0.0;  // RMS of log residuals
    std::size_t points = 0;
};

// Least squares of log(running max |M|) against log x over checkpoints
// x >= x_min. FitError with fewer than 10 usable (nonzero) points.
ExponentFit fit_exponent(const PartialSumSeries& series, std::uint64_t x_min = kDefaultXMin);

// mu^2 chi_3 to X with +-x^(1/4) envelopes.
struct FigureResult {
    PartialSumSeries series;
    std::optional<EnvelopeRatio> ratio;  // against x^(1/4) for x >= 10^3
};

FigureResult figure1_series(std::uint64_t limit, const CheckpointSchedule& schedule,
                            const SummationOptions& options = {});
// CSV "x,M,lower,upper".
void write_figure1_csv(const PartialSumSeries& series, std::ostream& out);
// Log-x, linear-y plot with exactly three polylines (sum, -env, +env).
std::string render_figure1_svg(const PartialSumSeries& series);
// Writes both files; ValidationError on an unwritable path.
FigureResult figure1(std::uint64_t limit, const std::filesystem::path& csv_path,
                     const std::filesystem::path& svg_path, const CheckpointSchedule& schedule,
                     const SummationOptions& options = {});

struct SplitPolicy {
    enum class Kind { theorem2, balanced, explicit_uv };
    Kind kind = Kind::theorem2;
    double u = 1.0;
    double v = 1.0;

    HyperbolaSplit resolve(std::uint64_t x, unsigned k) const;
    std::string describe() const;
};

struct ExperimentConfig {
    std::uint64_t modulus = 3;
    unsigned k = 2;
    ModificationPlan plan = ModificationPlan::empty(build_real_character(3));
    std::string plan_source = "empty";
    std::uint64_t limit = 0;
    BudgetParams budget;
    std::vector<EnvelopeSpec> envelopes;
    SplitPolicy split;
    double schedule_ratio = 1.05;
    unsigned threads = 1;
    std::uint64_t x_min = kDefaultXMin;
    std::uint64_t fit_x_min = kDefaultXMin;
};

// Strict schema; SchemaError carries the offending line. Relative plan
// paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = ".");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// f = mu_k^2 g and g itself for a config.
MultiplicativeRule config_g(const ExperimentConfig& config);
MultiplicativeRule config_f(const ExperimentConfig& config);

struct CompareReport {
    std::uint64_t x = 0;
    HyperbolaSplit split;
    std::int64_t direct = 0;
    std::int64_t hyperbola = 0;
    double direct_seconds = 0.0;
    double hyperbola_seconds = 0.0;
};

// M_f(x) by streaming summation and by the hyperbola identity with
// f = g * h. CorrectnessError if they differ.
CompareReport compare_methods(const ExperimentConfig& config, std::uint64_t x, const HyperbolaSplit& split);

// Hyperbola cross-checks inside `run` are skipped above this limit.
inline constexpr std::uint64_t kRunHyperbolaLimit = 10'000'000;

struct RunBundle {
    std::filesystem::path directory;
    std::vector<std::string> files;
    std::string summary_json;
};

// Writes series_f.csv, series_g.csv, budget.csv, envelopes.csv, fit.csv,
// plan.json and summary.json into out_dir. Output is byte-identical for
// identical configs regardless of thread count.
RunBundle run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);
RunBundle run_experiment(const std::filesystem::path& config_path, const std::filesystem::path& out_dir);

} // namespace kfree
