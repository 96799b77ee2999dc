// Command-line front end: anonymize, rules, stats, compare, sweep, dpcheck.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sacofa/anonymize.hpp"
#include "sacofa/dpcheck.hpp"
#include "sacofa/eval.hpp"
#include "sacofa/event_log.hpp"
#include "sacofa/rules.hpp"

namespace {

using namespace sacofa;

struct InputOptions {
    std::string path;
    std::string format = "auto";  // auto | csv | variants
    CsvColumnMap columns;
};

void add_input_options(CLI::App* cmd, InputOptions& opts,
                       const std::string& flag = "--input") {
    cmd->add_option(flag, opts.path, "input event log")->required();
    cmd->add_option("--format", opts.format, "input format: csv or variants")
        ->check(CLI::IsMember({"auto", "csv", "variants"}));
    cmd->add_option("--case-column", opts.columns.case_column,
                    "CSV case-id column name");
    cmd->add_option("--activity-column", opts.columns.activity_column,
                    "CSV activity column name");
    cmd->add_option("--order-column", opts.columns.order_column,
                    "CSV order-key column name (integer or RFC 3339)");
}

EventLog log_from_distribution(const VariantDistribution& dist) {
    EventLog log;
    std::vector<Activity> universe;
    int case_no = 0;
    for (const auto& [v, c] : dist.entries()) {
        if (!v.terminated)
            throw FormatError(
                "variant with unknown termination cannot seed an event log");
        for (const auto& a : v.activities) universe.push_back(a);
        for (std::uint64_t i = 0; i < c; ++i) {
            Trace t;
            t.case_id = "v" + std::to_string(++case_no);
            t.activities = v.activities;
            log.traces.push_back(t);
        }
    }
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    log.activity_universe = universe;
    return log;
}

EventLog load_log(const InputOptions& opts) {
    std::string format = opts.format;
    if (format == "auto") {
        auto ext = std::filesystem::path(opts.path).extension().string();
        format = (ext == ".csv") ? "csv" : "variants";
    }
    if (format == "csv") return load_csv(opts.path, opts.columns);
    return log_from_distribution(load_variants(opts.path));
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void write_report_file(const std::string& path, const RunReport& report,
                       const std::map<std::string, std::string>& config) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    for (const auto& [key, value] : config) out << key << '=' << value << '\n';
    out << "laplace_draws=" << report.laplace_draws << '\n';
    out << "exp_selections=" << report.exp_selections << '\n';
    out << "pruned_harmless=" << report.pruned_harmless << '\n';
    out << "pruned_harmful=" << report.pruned_harmful << '\n';
    for (std::size_t i = 0; i < report.candidates_per_depth.size(); ++i)
        out << "candidates_depth_" << (i + 1) << '='
            << report.candidates_per_depth[i] << '\n';
    for (const auto& w : report.warnings) out << "warning=" << w << '\n';
}

void log_config(const std::map<std::string, std::string>& config) {
    std::cerr << "config:";
    for (const auto& [key, value] : config) std::cerr << ' ' << key << '=' << value;
    std::cerr << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        if (!token.empty()) out.push_back(token);
    }
    return out;
}

std::uint64_t parse_threshold(const std::string& s) {
    if (s == "inf" || s == "infinity") return PruningStrategy::kInfinity;
    return std::stoull(s);
}

struct AnonymizeArgs {
    InputOptions input;
    std::string mechanism = "sacofa";
    double epsilon = 1.0;
    std::uint32_t k = 1;
    std::optional<std::string> p, p_harmless, p_harmful;
    std::string score = "binary";
    std::uint64_t cap = 3;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string report_path;
};

int run_anonymize(const AnonymizeArgs& args) {
    if (args.p && (args.p_harmless || args.p_harmful)) {
        std::cerr << "error: --p is mutually exclusive with "
                     "--p-harmless/--p-harmful\n";
        return 2;
    }
    if (static_cast<bool>(args.p_harmless) != static_cast<bool>(args.p_harmful)) {
        std::cerr << "error: --p-harmless and --p-harmful must be given "
                     "together\n";
        return 2;
    }
    if (args.mechanism == "laplace" && args.p_harmless) {
        std::cerr << "error: the laplace mechanism supports uniform pruning "
                     "(--p) only\n";
        return 2;
    }

    AnonymizationConfig cfg;
    cfg.epsilon = args.epsilon;
    cfg.max_len = args.k;
    if (args.p_harmless)
        cfg.pruning = PruningStrategy::semantic(parse_threshold(*args.p_harmless),
                                                parse_threshold(*args.p_harmful));
    else
        cfg.pruning = PruningStrategy::uniform(args.p ? parse_threshold(*args.p) : 1);
    cfg.score_fn.mode = args.score == "binary" ? ScoreFunction::Mode::Binary
                                               : ScoreFunction::Mode::Continuous;
    cfg.score_fn.cap = args.cap;
    cfg.seed = resolve_seed(args.seed);

    std::map<std::string, std::string> resolved = {
        {"subcommand", "anonymize"},
        {"input", args.input.path},
        {"mechanism", args.mechanism},
        {"epsilon", std::to_string(args.epsilon)},
        {"k", std::to_string(args.k)},
        {"score", args.score},
        {"seed", std::to_string(cfg.seed)},
        {"output", args.output},
    };
    if (cfg.pruning.kind == PruningStrategy::Kind::Uniform) {
        resolved["p"] = std::to_string(cfg.pruning.p);
    } else {
        resolved["p_harmless"] = std::to_string(cfg.pruning.p_harmless);
        resolved["p_harmful"] = cfg.pruning.p_harmful == PruningStrategy::kInfinity
                                    ? "inf"
                                    : std::to_string(cfg.pruning.p_harmful);
    }
    if (args.score == "continuous") resolved["cap"] = std::to_string(args.cap);
    log_config(resolved);

    EventLog log = load_log(args.input);
    auto [dist, report] = args.mechanism == "sacofa"
                              ? anonymize(log, cfg)
                              : anonymize_laplace(log, cfg.epsilon, cfg.max_len,
                                                  cfg.pruning.p, cfg.seed);
    write_variants(dist, args.output);
    if (!args.report_path.empty())
        write_report_file(args.report_path, report, resolved);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

int run_compare(const InputOptions& original, const std::string& anonymized,
                const std::string& output) {
    EventLog log = load_log(original);
    VariantDistribution dist = load_variants(anonymized);
    UtilityReport report = compare(log, dist);

    std::ostringstream tsv;
    tsv << "variant_recall\tvariant_precision\tl1_distance\tnormal_fraction\t"
           "total_count_original\ttotal_count_anonymized\n";
    tsv << report.variant_recall << '\t' << report.variant_precision << '\t'
        << report.l1_distance << '\t' << report.normal_fraction << '\t'
        << report.total_count_original << '\t' << report.total_count_anonymized
        << '\n';
    if (output.empty() || output == "-") {
        std::cout << tsv.str();
    } else {
        std::ofstream out(output);
        if (!out) throw FormatError("cannot open " + output + " for writing");
        out << tsv.str();
    }
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

std::map<std::string, std::string> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::map<std::string, std::string> config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + " line " + std::to_string(line_no) +
                              ": expected key=value");
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        value.erase(value.find_last_not_of(" \t") + 1);
        config[key] = value;
    }
    return config;
}

struct SweepArgs {
    std::string grid_path;
    std::string output;
    // flag overrides; flags win over the grid file
    std::optional<std::string> input;
    std::optional<std::uint64_t> base_seed;
};

int run_sweep(const SweepArgs& args) {
    auto grid = read_flat_config(args.grid_path);
    auto get = [&](const std::string& key,
                   const std::string& fallback) -> std::string {
        auto it = grid.find(key);
        return it == grid.end() ? fallback : it->second;
    };

    InputOptions input;
    input.path = args.input ? *args.input : get("input", "");
    if (input.path.empty())
        throw FormatError("sweep: no input given (grid key 'input' or --input)");
    input.format = get("format", "auto");

    std::vector<std::string> mechanisms = split_list(get("mechanisms", "sacofa,laplace"));
    std::vector<std::string> epsilons = split_list(get("epsilons", "1.0"));
    std::vector<std::string> seeds = split_list(get("seeds", "1"));
    std::uint32_t k = static_cast<std::uint32_t>(std::stoul(get("k", "5")));
    std::string score = get("score", "binary");
    std::uint64_t cap = std::stoull(get("cap", "3"));
    std::uint64_t base_seed = args.base_seed ? *args.base_seed : 0;

    EventLog log = load_log(input);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!args.output.empty() && args.output != "-") {
        file.open(args.output);
        if (!file) throw FormatError("cannot open " + args.output + " for writing");
        out = &file;
    }
    *out << "mechanism\tepsilon\tseed\tk\tpruning\tvariant_recall\t"
            "variant_precision\tl1_distance\tnormal_fraction\t"
            "total_count_anonymized\n";

    std::uint64_t cell = 0;
    for (const auto& mechanism : mechanisms) {
        for (const auto& eps_str : epsilons) {
            double epsilon = std::stod(eps_str);
            for (const auto& seed_str : seeds) {
                std::uint64_t seed = base_seed + std::stoull(seed_str);
                ++cell;

                AnonymizationConfig cfg;
                cfg.epsilon = epsilon;
                cfg.max_len = k;
                cfg.seed = seed;
                cfg.score_fn.mode = score == "binary"
                                        ? ScoreFunction::Mode::Binary
                                        : ScoreFunction::Mode::Continuous;
                cfg.score_fn.cap = cap;
                std::string pruning_desc;
                if (grid.count("p_harmless") && mechanism == "sacofa") {
                    cfg.pruning = PruningStrategy::semantic(
                        parse_threshold(grid.at("p_harmless")),
                        parse_threshold(grid.at("p_harmful")));
                    pruning_desc = grid.at("p_harmless") + "/" + grid.at("p_harmful");
                } else {
                    cfg.pruning = PruningStrategy::uniform(
                        parse_threshold(get("p", "1")));
                    pruning_desc = get("p", "1");
                }

                auto [dist, report] =
                    mechanism == "sacofa"
                        ? anonymize(log, cfg)
                        : anonymize_laplace(log, epsilon, k, cfg.pruning.p, seed);
                UtilityReport utility = compare(log, dist);
                *out << mechanism << '\t' << eps_str << '\t' << seed << '\t' << k
                     << '\t' << pruning_desc << '\t' << utility.variant_recall
                     << '\t' << utility.variant_precision << '\t'
                     << utility.l1_distance << '\t' << utility.normal_fraction
                     << '\t' << utility.total_count_anonymized << '\n';
            }
        }
    }
    std::cerr << "sweep: " << cell << " cells\n";
    return 0;
}

int run_dpcheck_cmd(std::uint64_t runs, double epsilon,
                    std::optional<std::uint64_t> seed) {
    DpCheckConfig cfg;
    cfg.runs = runs;
    cfg.epsilon = epsilon;
    cfg.seed = resolve_seed(seed);
    log_config({{"subcommand", "dpcheck"},
                {"runs", std::to_string(cfg.runs)},
                {"epsilon", std::to_string(cfg.epsilon)},
                {"seed", std::to_string(cfg.seed)}});

    DpCheckResult result = run_dp_check(cfg);
    for (const auto& ev : result.events) {
        std::cout << (ev.ok ? "ok  " : "FAIL") << "  p_base="
                  << ev.freq_base << "  p_neighbor=" << ev.freq_neighbor
                  << "  margin=" << ev.worst_margin << "  variant=";
        for (std::size_t i = 0; i < ev.variant.activities.size(); ++i) {
            if (i) std::cout << ',';
            std::cout << ev.variant.activities[i];
        }
        if (ev.variant.terminated) std::cout << (ev.variant.activities.empty() ? "(end)" : ",(end)");
        std::cout << '\n';
    }
    std::cout << (result.passed ? "PASS" : "FAIL") << " (" << result.runs
              << " runs per log, epsilon=" << epsilon << ")\n";
    return result.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differentially private trace-variant queries over event logs"};
    app.require_subcommand(1);

    AnonymizeArgs anon;
    auto* anonymize_cmd =
        app.add_subcommand("anonymize", "anonymize a trace-variant query");
    add_input_options(anonymize_cmd, anon.input);
    anonymize_cmd->add_option("--mechanism", anon.mechanism)
        ->check(CLI::IsMember({"sacofa", "laplace"}));
    anonymize_cmd->add_option("--epsilon", anon.epsilon, "privacy parameter")
        ->required();
    anonymize_cmd->add_option("--k", anon.k, "max prefix length")->required();
    anonymize_cmd->add_option("--p", anon.p, "uniform pruning threshold");
    anonymize_cmd->add_option("--p-harmless", anon.p_harmless,
                              "pruning threshold for harmless prefixes");
    anonymize_cmd->add_option("--p-harmful", anon.p_harmful,
                              "pruning threshold for harmful prefixes ('inf' allowed)");
    anonymize_cmd->add_option("--score", anon.score)
        ->check(CLI::IsMember({"binary", "continuous"}));
    anonymize_cmd->add_option("--cap", anon.cap,
                              "violation cap for the continuous score");
    anonymize_cmd->add_option("--seed", anon.seed, "RNG seed");
    anonymize_cmd->add_option("--output", anon.output)->required();
    anonymize_cmd->add_option("--report", anon.report_path,
                              "write a key=value run report");

    InputOptions rules_input;
    auto* rules_cmd =
        app.add_subcommand("rules", "emit the derived rule matrix as TSV");
    add_input_options(rules_cmd, rules_input);
    std::string rules_output;
    rules_cmd->add_option("--output", rules_output);

    InputOptions stats_input;
    auto* stats_cmd = app.add_subcommand("stats", "print log statistics");
    add_input_options(stats_cmd, stats_input);

    InputOptions compare_original;
    std::string compare_anonymized, compare_output;
    auto* compare_cmd =
        app.add_subcommand("compare", "utility metrics vs the original log");
    add_input_options(compare_cmd, compare_original, "--original");
    compare_cmd->add_option("--anonymized", compare_anonymized)->required();
    compare_cmd->add_option("--output", compare_output);

    SweepArgs sweep;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "run a mechanism x epsilon x seed grid");
    sweep_cmd->add_option("--grid", sweep.grid_path, "flat key=value grid config")
        ->required();
    sweep_cmd->add_option("--input", sweep.input, "override the grid input");
    sweep_cmd->add_option("--base-seed", sweep.base_seed);
    sweep_cmd->add_option("--output", sweep.output);

    std::uint64_t dpcheck_runs = 100000;
    double dpcheck_epsilon = 1.0;
    std::optional<std::uint64_t> dpcheck_seed;
    auto* dpcheck_cmd = app.add_subcommand(
        "dpcheck", "Monte Carlo neighboring-log smoke test");
    dpcheck_cmd->add_option("--runs", dpcheck_runs, "runs per log");
    dpcheck_cmd->add_option("--epsilon", dpcheck_epsilon);
    dpcheck_cmd->add_option("--seed", dpcheck_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(anonymize_cmd)) return run_anonymize(anon);
        if (app.got_subcommand(rules_cmd)) {
            log_config({{"subcommand", "rules"}, {"input", rules_input.path}});
            RuleSet rules = derive_rules(load_log(rules_input));
            if (rules_output.empty() || rules_output == "-") {
                write_rules_tsv(rules, std::cout);
            } else {
                std::ofstream out(rules_output);
                if (!out)
                    throw FormatError("cannot open " + rules_output +
                                      " for writing");
                write_rules_tsv(rules, out);
            }
            return 0;
        }
        if (app.got_subcommand(stats_cmd)) {
            EventLog log = load_log(stats_input);
            VariantDistribution dist = variant_query(log);
            std::cout << "cases=" << log.traces.size() << '\n'
                      << "variants=" << dist.size() << '\n'
                      << "activities=" << log.activity_universe.size() << '\n';
            std::size_t events = 0, max_len = 0;
            for (const auto& t : log.traces) {
                events += t.activities.size();
                max_len = std::max(max_len, t.activities.size());
            }
            std::cout << "events=" << events << '\n'
                      << "max_trace_length=" << max_len << '\n';
            return 0;
        }
        if (app.got_subcommand(compare_cmd))
            return run_compare(compare_original, compare_anonymized,
                               compare_output);
        if (app.got_subcommand(sweep_cmd)) return run_sweep(sweep);
        if (app.got_subcommand(dpcheck_cmd))
            return run_dpcheck_cmd(dpcheck_runs, dpcheck_epsilon, dpcheck_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
