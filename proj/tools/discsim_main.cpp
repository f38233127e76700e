#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "discsim/experiment.hpp"
#include "discsim/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

// Seed specs: "20" -> 1..20, "3,7,9" -> that list, "100:5" -> 100..104.
std::vector<uint64_t> parse_seeds(const std::string& spec) {
    std::vector<uint64_t> seeds;
    if (spec.find(':') != std::string::npos) {
        const auto colon = spec.find(':');
        const uint64_t base = std::stoull(spec.substr(0, colon));
        const uint64_t count = std::stoull(spec.substr(colon + 1));
        for (uint64_t i = 0; i < count; ++i) seeds.push_back(base + i);
    } else if (spec.find(',') != std::string::npos) {
        std::stringstream ss(spec);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (!token.empty()) seeds.push_back(std::stoull(token));
        }
    } else {
        const uint64_t count = std::stoull(spec);
        for (uint64_t i = 1; i <= count; ++i) seeds.push_back(i);
    }
    if (seeds.empty()) throw discsim::ConfigError("seed spec produced no seeds: " + spec);
    return seeds;
}

std::vector<uint64_t> parse_n_list(const std::string& spec) {
    std::vector<uint64_t> values;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) values.push_back(std::stoull(token));
    }
    if (values.empty()) throw discsim::ConfigError("empty n list");
    return values;
}

std::string default_out_path(const std::string& stem, const std::string& extension) {
    const char* dir = std::getenv("DISCSIM_OUT_DIR");
    std::string base = dir && *dir ? dir : ".";
    return base + "/" + stem + "." + extension;
}

// Opens path for writing, "-" meaning stdout.
std::ofstream open_output(const std::string& path, std::ostream*& out) {
    std::ofstream file;
    if (path == "-") {
        out = &std::cout;
        return file;
    }
    file.open(path, std::ios::out | std::ios::trunc);
    if (!file) throw std::ios_base::failure("cannot open output file: " + path);
    out = &file;
    return file;
}

struct RunOptions {
    std::string kind = "interval";
    uint64_t n = 1024;
    std::string seeds = "1";
    std::string algorithm = "potential";
    double height_divisor = 1.0;
    double lambda = 0.0;  // 0 -> default 1/ln n
    uint32_t tightness_height = 0;
    uint32_t tightness_arity = 0;
    uint64_t tightness_samples = 100000;
    std::string out;
    std::string format = "csv";
};

discsim::ExperimentConfig to_config(const RunOptions& opt) {
    discsim::ExperimentConfig config;
    config.kind = discsim::parse_experiment_kind(opt.kind);
    config.n = opt.n;
    config.seeds = parse_seeds(opt.seeds);
    config.algorithm = discsim::parse_algorithm_kind(opt.algorithm);
    config.height_divisor = opt.height_divisor;
    if (opt.lambda > 0.0) config.lambda = opt.lambda;
    if (opt.tightness_height > 0) config.tightness_height = opt.tightness_height;
    if (opt.tightness_arity > 0) config.tightness_arity = opt.tightness_arity;
    config.tightness_samples = opt.tightness_samples;
    config.format = discsim::parse_output_format(opt.format);
    config.out_path = opt.out;
    return config;
}

int command_run(const RunOptions& opt) {
    discsim::ExperimentConfig config = to_config(opt);
    config.validate();
    std::string path = config.out_path;
    if (path.empty())
        path = default_out_path(opt.kind + "-n" + std::to_string(opt.n) + "-" + opt.algorithm,
                                opt.format);

    std::ostream* out = nullptr;
    std::ofstream file = open_output(path, out);

    std::vector<uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    // Rows stream in canonical (sorted-seed) order and flush as they finish.
    bool first = true;
    if (config.format == discsim::OutputFormat::csv)
        discsim::write_csv_header(*out);
    else
        *out << "[\n";
    for (uint64_t seed : seeds) {
        const discsim::ResultRow row = discsim::run_single(config, seed);
        if (config.format == discsim::OutputFormat::csv) {
            discsim::write_csv_row(*out, row);
        } else {
            if (!first) *out << ",\n";
            *out << "  " << discsim::row_to_json_string(row);
        }
        first = false;
        out->flush();
        if (!*out) throw std::ios_base::failure("write failed: " + path);
    }
    if (config.format == discsim::OutputFormat::json) *out << "\n]\n";
    out->flush();
    if (!*out) throw std::ios_base::failure("write failed: " + path);
    if (path != "-") std::cerr << "wrote " << seeds.size() << " rows to " << path << "\n";
    return kExitOk;
}

int command_sweep(const RunOptions& opt, const std::string& n_list) {
    discsim::ExperimentConfig config = to_config(opt);
    const std::vector<uint64_t> n_values = parse_n_list(n_list);
    config.n = n_values.front();
    config.validate();
    const discsim::SweepResult result = discsim::sweep(config, n_values);

    std::string path = config.out_path;
    if (path.empty()) path = default_out_path(opt.kind + "-sweep", opt.format);
    std::ostream* out = nullptr;
    std::ofstream file = open_output(path, out);
    if (config.format == discsim::OutputFormat::csv)
        discsim::write_sweep_csv(*out, result);
    else
        discsim::write_sweep_json(*out, result);
    out->flush();
    if (!*out) throw std::ios_base::failure("write failed: " + path);
    if (path != "-") std::cerr << "wrote sweep table to " << path << "\n";
    return kExitOk;
}

int command_verify(const std::string& suite, const std::string& out_path, bool json_stdout) {
    const discsim::VerifyReport report = discsim::verify_suite(suite);
    if (json_stdout)
        discsim::write_verify_json(std::cout, report);
    else
        discsim::write_verify_text(std::cout, report);
    if (!out_path.empty()) {
        std::ostream* out = nullptr;
        std::ofstream file = open_output(out_path, out);
        discsim::write_verify_json(*out, report);
        out->flush();
        if (!*out) throw std::ios_base::failure("write failed: " + out_path);
    }
    return report.pass ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discsim: online discrepancy minimization simulator"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string n_list;
    std::string suite = "all";
    std::string verify_out;
    bool verify_json = false;

    CLI::App* run = app.add_subcommand("run", "run one experiment across seeds");
    run->add_option("--kind", opt.kind,
                    "interval|stripe|envy|adversary-adaptive|adversary-oblivious|tightness|facts-check");
    run->add_option("--n", opt.n, "arrival / item count");
    run->add_option("--seeds", opt.seeds, "count, list a,b,c or base:count");
    run->add_option("--algo", opt.algorithm, "potential|random|alternating-offline");
    run->add_option("--C", opt.height_divisor, "height divisor in h = log2 log2 n / C");
    run->add_option("--lambda", opt.lambda, "potential scale lambda (default 1/ln n)");
    run->add_option("--height", opt.tightness_height, "tightness fixture height");
    run->add_option("--arity", opt.tightness_arity, "tightness fixture arity");
    run->add_option("--samples", opt.tightness_samples, "tightness Monte Carlo path samples");
    run->add_option("--out", opt.out, "output path ('-' for stdout; default $DISCSIM_OUT_DIR)");
    run->add_option("--format", opt.format, "csv|json");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "growth table over an n grid");
    sweep_cmd->add_option("--kind", opt.kind, "experiment kind");
    sweep_cmd->add_option("--n-list", n_list, "comma-separated increasing n values")->required();
    sweep_cmd->add_option("--seeds", opt.seeds, "seed spec per cell");
    sweep_cmd->add_option("--C", opt.height_divisor, "height divisor");
    sweep_cmd->add_option("--lambda", opt.lambda, "lambda override");
    sweep_cmd->add_option("--out", opt.out, "output path ('-' for stdout)");
    sweep_cmd->add_option("--format", opt.format, "csv|json");

    CLI::App* verify_cmd = app.add_subcommand("verify", "oracle/invariant suites");
    verify_cmd->add_option("--suite", suite, "oracles|invariants|envy-equivalence|adversary|facts|all");
    verify_cmd->add_option("--out", verify_out, "write JSON report to this path");
    verify_cmd->add_flag("--json", verify_json, "print JSON instead of text");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return command_run(opt);
        if (sweep_cmd->parsed()) return command_sweep(opt, n_list);
        return command_verify(suite, verify_out, verify_json);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const discsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}
