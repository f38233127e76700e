#include "discsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "discsim/adversary.hpp"
#include "discsim/envy.hpp"
#include "discsim/interval.hpp"
#include "discsim/rng.hpp"
#include "discsim/stripe.hpp"
#include "discsim/tree_balancer.hpp"

namespace discsim {

namespace {

// Fixed split labels so every kind consumes its streams in a stable order.
enum StreamLabel : uint64_t {
    kPositionsX = 1,
    kSigns = 2,
    kPositionsY = 3,
    kValuesP1 = 4,
    kValuesP2 = 5,
    kScript = 6,
    kProbe = 7,
};

std::vector<double> draw_units(Rng& rng, uint64_t count) {
    std::vector<double> out(count);
    for (auto& u : out) u = rng.next_unit();
    return out;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double idx = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(idx));
    const auto hi = static_cast<size_t>(std::ceil(idx));
    const double w = idx - static_cast<double>(lo);
    return values[lo] * (1.0 - w) + values[hi] * w;
}

struct EnvyBaselineMetrics {
    int64_t running_disc_x;
    int64_t running_disc_y;
    int64_t running_stripe;
    double cardinal_p1;
    double cardinal_p2;
    int64_t ordinal_p1;
    int64_t ordinal_p2;
};

// Random-allocation baseline: same valuation streams, i.i.d. uniform signs.
EnvyBaselineMetrics envy_random_allocation(std::span<const double> v1,
                                           std::span<const double> v2, Rng& sign_rng) {
    RunningDiscrepancyTracker tx(v1);
    RunningDiscrepancyTracker ty(v2);
    std::vector<uint8_t> allocation(v1.size());
    double diff1 = 0.0;
    double diff2 = 0.0;
    for (size_t j = 0; j < v1.size(); ++j) {
        const int sign = sign_rng.next_sign();
        allocation[j] = (sign == -1) ? 1 : 0;
        tx.add(v1[j], sign);
        ty.add(v2[j], sign);
        diff1 += sign * v1[j];
        diff2 -= sign * v2[j];
    }
    std::vector<uint8_t> complement(allocation.size());
    for (size_t j = 0; j < allocation.size(); ++j) complement[j] = allocation[j] ? 0 : 1;
    return EnvyBaselineMetrics{
        tx.running_discrepancy(),
        ty.running_discrepancy(),
        std::max(tx.running_discrepancy(), ty.running_discrepancy()),
        std::max(diff1, 0.0),
        std::max(diff2, 0.0),
        ordinal_envy_prefix(v1, allocation),
        ordinal_envy_prefix(v2, complement),
    };
}

double facts_pass_fraction(uint64_t n, double lambda, Rng& rng, uint64_t samples_per_case) {
    const double ln_n_over_lambda = std::log(static_cast<double>(n)) / lambda;
    const double half_width = std::log(10.0) / lambda;
    uint64_t total = 0;
    uint64_t passed = 0;
    auto account = [&](const DangerousSetReport& r) {
        ++total;
        if (r.hypothesis_ok && r.pass) ++passed;
    };
    for (uint64_t i = 0; i < samples_per_case; ++i) {
        const double mag = ln_n_over_lambda * (1.0 + rng.next_unit());
        const double x = rng.next_sign() > 0 ? mag : -mag;
        const double y = -x + (2.0 * rng.next_unit() - 1.0) * half_width;
        account(dangerous_set_facts_check(x, y, lambda, n));
    }
    for (uint64_t i = 0; i < samples_per_case; ++i) {
        const double mag = ln_n_over_lambda * (1.0 + rng.next_unit());
        const double x = rng.next_sign() > 0 ? mag : -mag;
        double y;
        do {
            y = (2.0 * rng.next_unit() - 1.0) * 3.0 * std::fabs(x);
        } while (y >= -x - half_width && y <= -x + half_width);
        account(dangerous_set_facts_check(x, y, lambda, n));
    }
    account(dangerous_set_facts_check(ln_n_over_lambda, -ln_n_over_lambda, lambda, n));
    account(dangerous_set_facts_check(ln_n_over_lambda, ln_n_over_lambda, lambda, n));
    return static_cast<double>(passed) / static_cast<double>(total);
}

ResultRow run_single_timed(const ExperimentConfig& config, uint64_t seed) {
    ResultRow row;
    row.kind = to_string(config.kind);
    row.algorithm = to_string(config.algorithm);
    row.n = config.n;
    row.seed = seed;
    row.lambda = config.effective_lambda();

    Rng root(seed);
    switch (config.kind) {
        case ExperimentKind::interval: {
            const EmbeddingParams params = EmbeddingParams::derive(config.n, config.height_divisor);
            row.h = params.height;
            row.m = params.arity;
            Rng pos_rng = root.split(kPositionsX);
            const std::vector<double> positions = draw_units(pos_rng, config.n);
            row.arrivals = positions.size();
            if (config.algorithm == AlgorithmKind::potential) {
                IntervalRunResult r = run_online_interval(positions, params, row.lambda);
                row.running_interval_disc = r.running_interval_disc;
                row.final_interval_disc = r.final_interval_disc;
                row.tree_disc = r.tree_discrepancy;
                row.potential_overflow = r.final_potential.overflowed;
                if (!r.final_potential.overflowed) row.potential = r.final_potential.value;
            } else {
                Transcript t;
                if (config.algorithm == AlgorithmKind::random_coloring) {
                    Rng sign_rng = root.split(kSigns);
                    t = random_coloring(positions, sign_rng);
                } else {
                    t.positions = positions;
                    t.signs = offline_alternating_coloring(positions);
                }
                RunningDiscrepancyTracker tracker(positions);
                for (size_t j = 0; j < t.size(); ++j) tracker.add(t.positions[j], t.signs[j]);
                row.running_interval_disc = tracker.running_discrepancy();
                row.final_interval_disc = tracker.current_discrepancy();
            }
            break;
        }
        case ExperimentKind::stripe: {
            const EmbeddingParams params = EmbeddingParams::derive(config.n, config.height_divisor);
            row.h = params.height;
            row.m = params.arity;
            Rng x_rng = root.split(kPositionsX);
            Rng y_rng = root.split(kPositionsY);
            std::vector<Point2> points(config.n);
            for (auto& p : points) p = Point2{x_rng.next_unit(), y_rng.next_unit()};
            row.arrivals = points.size();
            if (config.algorithm == AlgorithmKind::potential) {
                StripeRunResult r = run_online_stripe(points, params, row.lambda);
                row.stripe_disc_x = r.running_disc_x;
                row.stripe_disc_y = r.running_disc_y;
                row.stripe_disc = r.running_stripe_disc;
                row.tree_disc = std::max(r.tree_disc_x, r.tree_disc_y);
            } else {
                Rng sign_rng = root.split(kSigns);
                std::vector<double> xs(config.n);
                std::vector<double> ys(config.n);
                for (size_t j = 0; j < points.size(); ++j) {
                    xs[j] = points[j].x;
                    ys[j] = points[j].y;
                }
                RunningDiscrepancyTracker tx(xs);
                RunningDiscrepancyTracker ty(ys);
                for (size_t j = 0; j < points.size(); ++j) {
                    const int sign = sign_rng.next_sign();
                    tx.add(xs[j], sign);
                    ty.add(ys[j], sign);
                }
                row.stripe_disc_x = tx.running_discrepancy();
                row.stripe_disc_y = ty.running_discrepancy();
                row.stripe_disc = std::max(tx.running_discrepancy(), ty.running_discrepancy());
            }
            break;
        }
        case ExperimentKind::envy: {
            const EmbeddingParams params = EmbeddingParams::derive(config.n, config.height_divisor);
            row.h = params.height;
            row.m = params.arity;
            Rng v1_rng = root.split(kValuesP1);
            Rng v2_rng = root.split(kValuesP2);
            const std::vector<double> v1 = draw_units(v1_rng, config.n);
            const std::vector<double> v2 = draw_units(v2_rng, config.n);
            row.arrivals = config.n;
            if (config.algorithm == AlgorithmKind::potential) {
                EnvyRunResult r = run_online_envy(v1, v2, CdfPair::identity(), params, row.lambda);
                row.stripe_disc_x = r.running_disc_x;
                row.stripe_disc_y = r.running_disc_y;
                row.stripe_disc = r.running_stripe_disc;
                row.envy_cardinal_p1 = r.final_cardinal_envy_p1;
                row.envy_cardinal_p2 = r.final_cardinal_envy_p2;
                row.envy_ordinal_p1 = r.final_ordinal_envy_p1;
                row.envy_ordinal_p2 = r.final_ordinal_envy_p2;
            } else {
                Rng sign_rng = root.split(kSigns);
                EnvyBaselineMetrics r = envy_random_allocation(v1, v2, sign_rng);
                row.stripe_disc_x = r.running_disc_x;
                row.stripe_disc_y = r.running_disc_y;
                row.stripe_disc = r.running_stripe;
                row.envy_cardinal_p1 = r.cardinal_p1;
                row.envy_cardinal_p2 = r.cardinal_p2;
                row.envy_ordinal_p1 = r.ordinal_p1;
                row.envy_ordinal_p2 = r.ordinal_p2;
            }
            break;
        }
        case ExperimentKind::adversary_adaptive: {
            row.arrivals = config.n;
            AdversaryGameResult r{};
            if (config.algorithm == AlgorithmKind::potential) {
                PotentialColorer colorer(config.n, config.height_divisor);
                r = run_adaptive_game(colorer, config.n);
            } else {
                RandomColorer colorer(root.split(kSigns));
                r = run_adaptive_game(colorer, config.n);
            }
            row.running_interval_disc = r.discrepancy;
            row.final_interval_disc = r.discrepancy;
            break;
        }
        case ExperimentKind::adversary_oblivious: {
            row.arrivals = config.n;
            Rng script_rng = root.split(kScript);
            const ObliviousScript script = build_oblivious_script(config.n, script_rng);
            AdversaryGameResult r{};
            if (config.algorithm == AlgorithmKind::potential) {
                PotentialColorer colorer(config.n, config.height_divisor);
                r = run_script(script, colorer);
            } else {
                RandomColorer colorer(root.split(kSigns));
                r = run_script(script, colorer);
            }
            row.running_interval_disc = r.discrepancy;
            row.final_interval_disc = r.discrepancy;
            break;
        }
        case ExperimentKind::tightness: {
            const uint32_t h = config.tightness_height.value_or(3);
            const auto root_arity =
                std::llround(std::pow(static_cast<double>(config.n), 1.0 / h));
            const uint32_t m = config.tightness_arity.value_or(
                static_cast<uint32_t>(std::max<long long>(root_arity, 2)));
            row.h = h;
            row.m = m;
            Rng probe_rng = root.split(kProbe);
            TightnessFixture fixture =
                separation_tightness_fixture(m, h, config.n, config.tightness_samples, probe_rng);
            row.lambda = fixture.report.lambda;
            row.arrivals = config.tightness_samples;
            row.tightness_mean_abs_l = fixture.report.mean_abs_l;
            row.tightness_mean_q = fixture.report.mean_q;
            row.tightness_ratio = fixture.report.ratio;
            break;
        }
        case ExperimentKind::facts_check: {
            Rng probe_rng = root.split(kProbe);
            row.arrivals = 20002;
            row.facts_pass_fraction =
                facts_pass_fraction(config.n, row.lambda, probe_rng, 10000);
            break;
        }
    }
    return row;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::interval: return "interval";
        case ExperimentKind::stripe: return "stripe";
        case ExperimentKind::envy: return "envy";
        case ExperimentKind::adversary_adaptive: return "adversary-adaptive";
        case ExperimentKind::adversary_oblivious: return "adversary-oblivious";
        case ExperimentKind::tightness: return "tightness";
        case ExperimentKind::facts_check: return "facts-check";
    }
    return "unknown";
}

std::string to_string(AlgorithmKind algorithm) {
    switch (algorithm) {
        case AlgorithmKind::potential: return "potential";
        case AlgorithmKind::random_coloring: return "random";
        case AlgorithmKind::alternating_offline: return "alternating-offline";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto kind : {ExperimentKind::interval, ExperimentKind::stripe, ExperimentKind::envy,
                      ExperimentKind::adversary_adaptive, ExperimentKind::adversary_oblivious,
                      ExperimentKind::tightness, ExperimentKind::facts_check})
        if (to_string(kind) == name) return kind;
    throw ConfigError("unknown experiment kind: " + name);
}

AlgorithmKind parse_algorithm_kind(const std::string& name) {
    for (auto algorithm : {AlgorithmKind::potential, AlgorithmKind::random_coloring,
                           AlgorithmKind::alternating_offline})
        if (to_string(algorithm) == name) return algorithm;
    throw ConfigError("unknown algorithm: " + name);
}

OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("unknown output format: " + name);
}

void ExperimentConfig::validate() const {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(height_divisor > 0.0)) throw ConfigError("height divisor C must be positive");
    if (lambda && !(*lambda > 0.0)) throw ConfigError("lambda must be positive");
    const bool needs_embedding = kind == ExperimentKind::interval ||
                                 kind == ExperimentKind::stripe || kind == ExperimentKind::envy;
    if (needs_embedding && n < 4)
        throw ConfigError("interval/stripe/envy experiments need n >= 4");
    const bool offline_ok = kind == ExperimentKind::interval;
    if (algorithm == AlgorithmKind::alternating_offline && !offline_ok)
        throw ConfigError("alternating-offline only applies to the interval kind");
    if (tightness_height && *tightness_height < 1) throw ConfigError("tightness height must be >= 1");
    if (tightness_arity && *tightness_arity < 2) throw ConfigError("tightness arity must be >= 2");
    if (kind == ExperimentKind::tightness && n < 3)
        throw ConfigError("tightness experiments need n >= 3");
}

double ExperimentConfig::effective_lambda() const {
    if (lambda) return *lambda;
    const double ln_n = std::log(static_cast<double>(std::max<uint64_t>(n, 2)));
    return 1.0 / std::max(ln_n, 1e-9);
}

double primary_metric(const ResultRow& row) {
    if (row.kind == "envy" && row.envy_cardinal_p1 && row.envy_cardinal_p2)
        return std::max(*row.envy_cardinal_p1, *row.envy_cardinal_p2);
    if (row.stripe_disc) return static_cast<double>(*row.stripe_disc);
    if (row.running_interval_disc) return static_cast<double>(*row.running_interval_disc);
    if (row.tightness_ratio) return *row.tightness_ratio;
    if (row.facts_pass_fraction) return *row.facts_pass_fraction;
    return 0.0;
}

ResultRow run_single(const ExperimentConfig& config, uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    ResultRow row = run_single_timed(config, seed);
    const auto stop = std::chrono::steady_clock::now();
    row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    std::vector<ResultRow> rows;
    rows.reserve(seeds.size());
    for (uint64_t seed : seeds) rows.push_back(run_single(config, seed));
    return rows;
}

const char* const kCsvHeader =
    "schema_version,kind,n,seed,algorithm,h,m,lambda,arrivals,running_interval_disc,"
    "final_interval_disc,tree_disc,stripe_disc_x,stripe_disc_y,stripe_disc,"
    "envy_cardinal_p1,envy_cardinal_p2,envy_ordinal_p1,envy_ordinal_p2,potential,"
    "tightness_mean_abs_l,tightness_mean_q,tightness_ratio,facts_pass_fraction,wall_time_ms";

namespace {

void append_opt(std::string& line, const std::optional<int64_t>& value) {
    line += ',';
    if (value) line += std::to_string(*value);
}

void append_opt(std::string& line, const std::optional<double>& value) {
    line += ',';
    if (value) line += format_double(*value);
}

}  // namespace

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const ResultRow& row) {
    std::string line = "1";
    line += ',' + row.kind;
    line += ',' + std::to_string(row.n);
    line += ',' + std::to_string(row.seed);
    line += ',' + row.algorithm;
    line += ',' + std::to_string(row.h);
    line += ',' + std::to_string(row.m);
    line += ',' + format_double(row.lambda);
    line += ',' + std::to_string(row.arrivals);
    append_opt(line, row.running_interval_disc);
    append_opt(line, row.final_interval_disc);
    append_opt(line, row.tree_disc);
    append_opt(line, row.stripe_disc_x);
    append_opt(line, row.stripe_disc_y);
    append_opt(line, row.stripe_disc);
    append_opt(line, row.envy_cardinal_p1);
    append_opt(line, row.envy_cardinal_p2);
    append_opt(line, row.envy_ordinal_p1);
    append_opt(line, row.envy_ordinal_p2);
    line += ',';
    if (row.potential_overflow)
        line += "overflow";
    else if (row.potential)
        line += format_double(*row.potential);
    append_opt(line, row.tightness_mean_abs_l);
    append_opt(line, row.tightness_mean_q);
    append_opt(line, row.tightness_ratio);
    append_opt(line, row.facts_pass_fraction);
    line += ',' + format_double(row.wall_time_ms);
    out << line << '\n';
}

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows) {
    write_csv_header(out);
    for (const ResultRow& row : rows) write_csv_row(out, row);
}

namespace {

nlohmann::json row_to_json(const ResultRow& row) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = row.kind;
    j["n"] = row.n;
    j["seed"] = row.seed;
    j["algorithm"] = row.algorithm;
    j["h"] = row.h;
    j["m"] = row.m;
    j["lambda"] = row.lambda;
    j["arrivals"] = row.arrivals;
    auto put_int = [&j](const char* key, const std::optional<int64_t>& v) {
        j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    auto put_double = [&j](const char* key, const std::optional<double>& v) {
        j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    put_int("running_interval_disc", row.running_interval_disc);
    put_int("final_interval_disc", row.final_interval_disc);
    put_int("tree_disc", row.tree_disc);
    put_int("stripe_disc_x", row.stripe_disc_x);
    put_int("stripe_disc_y", row.stripe_disc_y);
    put_int("stripe_disc", row.stripe_disc);
    put_double("envy_cardinal_p1", row.envy_cardinal_p1);
    put_double("envy_cardinal_p2", row.envy_cardinal_p2);
    put_int("envy_ordinal_p1", row.envy_ordinal_p1);
    put_int("envy_ordinal_p2", row.envy_ordinal_p2);
    if (row.potential_overflow)
        j["potential"] = "overflow";
    else
        put_double("potential", row.potential);
    put_double("tightness_mean_abs_l", row.tightness_mean_abs_l);
    put_double("tightness_mean_q", row.tightness_mean_q);
    put_double("tightness_ratio", row.tightness_ratio);
    put_double("facts_pass_fraction", row.facts_pass_fraction);
    j["wall_time_ms"] = row.wall_time_ms;
    return j;
}

}  // namespace

void write_rows_json(std::ostream& out, std::span<const ResultRow> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ResultRow& row : rows) arr.push_back(row_to_json(row));
    out << arr.dump(2) << '\n';
}

std::string row_to_json_string(const ResultRow& row) { return row_to_json(row).dump(); }

namespace {

std::vector<AlgorithmKind> sweep_algorithms(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::interval:
            return {AlgorithmKind::potential, AlgorithmKind::random_coloring,
                    AlgorithmKind::alternating_offline};
        case ExperimentKind::stripe:
        case ExperimentKind::envy:
        case ExperimentKind::adversary_adaptive:
        case ExperimentKind::adversary_oblivious:
            return {AlgorithmKind::potential, AlgorithmKind::random_coloring};
        default:
            return {AlgorithmKind::potential};
    }
}

}  // namespace

SweepResult sweep(const ExperimentConfig& base, std::span<const uint64_t> n_values) {
    if (n_values.empty()) throw ConfigError("sweep needs at least one n value");
    for (size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1])
            throw ConfigError("sweep n values must be strictly increasing");

    SweepResult result;
    for (AlgorithmKind algorithm : sweep_algorithms(base.kind)) {
        std::vector<double> log_n;
        std::vector<double> log_median;
        for (uint64_t n : n_values) {
            ExperimentConfig config = base;
            config.algorithm = algorithm;
            config.n = n;
            config.out_path.clear();
            std::vector<double> metrics;
            for (const ResultRow& row : run_experiment(config))
                metrics.push_back(primary_metric(row));
            SweepCell cell;
            cell.algorithm = to_string(algorithm);
            cell.n = n;
            cell.rows = metrics.size();
            cell.median = quantile(metrics, 0.5);
            cell.q25 = quantile(metrics, 0.25);
            cell.q75 = quantile(metrics, 0.75);
            result.cells.push_back(cell);
            log_n.push_back(std::log(static_cast<double>(n)));
            log_median.push_back(std::log(std::max(cell.median, 0.5)));
        }
        if (log_n.size() >= 2) {
            double mean_x = 0.0;
            double mean_y = 0.0;
            for (size_t i = 0; i < log_n.size(); ++i) {
                mean_x += log_n[i];
                mean_y += log_median[i];
            }
            mean_x /= static_cast<double>(log_n.size());
            mean_y /= static_cast<double>(log_n.size());
            double cov = 0.0;
            double var = 0.0;
            for (size_t i = 0; i < log_n.size(); ++i) {
                cov += (log_n[i] - mean_x) * (log_median[i] - mean_y);
                var += (log_n[i] - mean_x) * (log_n[i] - mean_x);
            }
            result.slopes[to_string(algorithm)] = cov / var;
        }
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "algorithm,n,rows,median,q25,q75,slope\n";
    for (const SweepCell& cell : result.cells) {
        const auto it = result.slopes.find(cell.algorithm);
        out << cell.algorithm << ',' << cell.n << ',' << cell.rows << ','
            << format_double(cell.median) << ',' << format_double(cell.q25) << ','
            << format_double(cell.q75) << ','
            << (it != result.slopes.end() ? format_double(it->second) : std::string()) << '\n';
    }
}

void write_sweep_json(std::ostream& out, const SweepResult& result) {
    nlohmann::json j;
    j["cells"] = nlohmann::json::array();
    for (const SweepCell& cell : result.cells) {
        nlohmann::json c;
        c["algorithm"] = cell.algorithm;
        c["n"] = cell.n;
        c["rows"] = cell.rows;
        c["median"] = cell.median;
        c["q25"] = cell.q25;
        c["q75"] = cell.q75;
        j["cells"].push_back(c);
    }
    j["slopes"] = result.slopes;
    out << j.dump(2) << '\n';
}

}  // namespace discsim
