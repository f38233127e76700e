#pragma once
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace discsim {

enum class ExperimentKind {
    interval,
    stripe,
    envy,
    adversary_adaptive,
    adversary_oblivious,
    tightness,
    facts_check,
};

enum class AlgorithmKind { potential, random_coloring, alternating_offline };
enum class OutputFormat { csv, json };

std::string to_string(ExperimentKind kind);
std::string to_string(AlgorithmKind algorithm);
ExperimentKind parse_experiment_kind(const std::string& name);    // throws ConfigError
AlgorithmKind parse_algorithm_kind(const std::string& name);      // throws ConfigError
OutputFormat parse_output_format(const std::string& name);        // throws ConfigError

/// Invalid configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::interval;
    uint64_t n = 1024;
    std::vector<uint64_t> seeds = {1};
    double height_divisor = 1.0;          // C
    std::optional<double> lambda;         // default 1 / ln(n)
    AlgorithmKind algorithm = AlgorithmKind::potential;
    std::optional<uint32_t> tightness_height;  // tightness kind only; default 3
    std::optional<uint32_t> tightness_arity;   // default round(n^(1/h))
    uint64_t tightness_samples = 100000;
    std::string out_path;                 // empty -> default dir + generated name
    OutputFormat format = OutputFormat::csv;

    void validate() const;                // throws ConfigError
    double effective_lambda() const;
};

/// One (seed x n) measurement. Fields that do not apply to the experiment
/// kind stay empty. Numeric fields are finite; an overflowed potential is
/// written out as the string "overflow".
struct ResultRow {
    std::string kind;
    uint64_t n = 0;
    uint64_t seed = 0;
    std::string algorithm;
    uint32_t h = 0;
    uint32_t m = 0;
    double lambda = 0.0;
    uint64_t arrivals = 0;
    std::optional<int64_t> running_interval_disc;
    std::optional<int64_t> final_interval_disc;
    std::optional<int64_t> tree_disc;
    std::optional<int64_t> stripe_disc_x;
    std::optional<int64_t> stripe_disc_y;
    std::optional<int64_t> stripe_disc;
    std::optional<double> envy_cardinal_p1;
    std::optional<double> envy_cardinal_p2;
    std::optional<int64_t> envy_ordinal_p1;
    std::optional<int64_t> envy_ordinal_p2;
    std::optional<double> potential;
    bool potential_overflow = false;
    std::optional<double> tightness_mean_abs_l;
    std::optional<double> tightness_mean_q;
    std::optional<double> tightness_ratio;
    std::optional<double> facts_pass_fraction;
    double wall_time_ms = 0.0;  // informational; excluded from determinism
};

/// Headline metric of a row for aggregation (kind-dependent).
double primary_metric(const ResultRow& row);

/// Runs one cell; deterministic given (config, seed) apart from wall time.
ResultRow run_single(const ExperimentConfig& config, uint64_t seed);

/// All seeds of the config in canonical order (sorted by seed).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

extern const char* const kCsvHeader;  // schema_version first, wall_time_ms last
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ResultRow& row);
std::string row_to_json_string(const ResultRow& row);
void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_rows_json(std::ostream& out, std::span<const ResultRow> rows);

struct SweepCell {
    std::string algorithm;
    uint64_t n = 0;
    size_t rows = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;            // sorted by (algorithm, n)
    std::map<std::string, double> slopes;    // log-log regression on medians;
                                             // absent with fewer than 2 n values
};

/// Runs the config's kind across n_values for every applicable algorithm and
/// aggregates the primary metric. n_values must be strictly increasing.
SweepResult sweep(const ExperimentConfig& base, std::span<const uint64_t> n_values);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_json(std::ostream& out, const SweepResult& result);

}  // namespace discsim
