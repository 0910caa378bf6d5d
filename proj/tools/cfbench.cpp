#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfssm/bench.hpp"
#include "cfssm/csv.hpp"
#include "cfssm/errors.hpp"
#include "cfssm/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;  // check or IO failure
constexpr int exit_usage = 2;    // bad arguments / rejected configuration

struct RunOptions {
    std::string scenario;
    std::vector<std::string> methods;
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "results";
    std::optional<int> parallelism;
    std::optional<double> delta;
    std::optional<int> window;
    std::optional<int> particles;
    std::optional<int> horizon;
    std::optional<double> process_var;
    std::optional<double> obs_var;
    std::optional<double> init_var;
    std::string config_file;
};

// Precedence: built-in scenario defaults < config file < command-line
// flags. Flags were already parsed; fill anything still unset from the
// config file here.
void apply_config_file(RunOptions& opt) {
    if (opt.config_file.empty()) return;
    std::ifstream in(opt.config_file);
    if (!in) throw cfssm::InvalidInputError("cannot open config file '" + opt.config_file + "'");
    json cfg = json::parse(in);
    auto fill = [&cfg](const char* key, auto& slot) {
        using T = typename std::decay_t<decltype(slot)>::value_type;
        if (!slot && cfg.contains(key)) slot = cfg.at(key).get<T>();
    };
    if (opt.scenario.empty() && cfg.contains("scenario"))
        opt.scenario = cfg.at("scenario").get<std::string>();
    if (opt.methods.empty() && cfg.contains("methods"))
        opt.methods = cfg.at("methods").get<std::vector<std::string>>();
    fill("runs", opt.runs);
    fill("seed", opt.seed);
    fill("parallelism", opt.parallelism);
    fill("delta", opt.delta);
    fill("window", opt.window);
    fill("particles", opt.particles);
    fill("horizon", opt.horizon);
    fill("process_var", opt.process_var);
    fill("obs_var", opt.obs_var);
    fill("init_var", opt.init_var);
    if (cfg.contains("out") && opt.out_dir == "results")
        opt.out_dir = cfg.at("out").get<std::string>();
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    if (const char* env = std::getenv("CF_SSM_SEED")) return std::stoull(env);
    return 42;
}

int cmd_run(RunOptions opt) {
    cfssm::Scenario sc;
    std::vector<cfssm::MethodId> methods;
    std::uint64_t seed = 42;
    int parallelism = 1;
    try {
        apply_config_file(opt);
        sc = cfssm::build_scenario(opt.scenario);
        if (opt.process_var || opt.obs_var || opt.init_var) {
            cfssm::NoiseConfig noise = sc.noise;
            if (opt.process_var) noise.process_var = *opt.process_var;
            if (opt.obs_var) noise.obs_var = *opt.obs_var;
            if (opt.init_var) noise.init_var = *opt.init_var;
            sc = cfssm::build_scenario(opt.scenario, noise);
        }
        if (opt.delta) sc.cf.delta = *opt.delta;
        if (opt.window) sc.cf.window = *opt.window;
        if (opt.particles) sc.num_particles = *opt.particles;
        if (opt.horizon) sc.horizon = *opt.horizon;
        if (opt.runs) sc.num_runs = *opt.runs;
        sc.validate();
        seed = resolve_seed(opt.seed);
        parallelism = opt.parallelism.value_or(
            static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
        if (opt.methods.empty()) {
            methods = cfssm::default_methods(sc);
        } else {
            for (const std::string& name : opt.methods) {
                const auto m = cfssm::MethodId::parse(name, sc.bank);
                if (!m) throw cfssm::InvalidInputError("unknown method '" + name + "'");
                methods.push_back(*m);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        fs::create_directories(opt.out_dir);
        std::vector<cfssm::RunResult> runs;
        const cfssm::Summary summary =
            cfssm::monte_carlo(sc, methods, sc.num_runs, seed, parallelism, &runs);
        const auto rows = cfssm::csv::to_rows(summary);
        cfssm::csv::write_summary((fs::path(opt.out_dir) / "summary.csv").string(), rows);
        for (const cfssm::RunResult& run : runs) {
            const std::string fname = "trace_" + run.method.label(sc.bank) + "_" +
                                      std::to_string(run.run_index) + ".csv";
            cfssm::csv::write_trace((fs::path(opt.out_dir) / fname).string(), run, sc.dim,
                                    sc.bank.size());
        }
        std::cout << cfssm::csv::render_table(rows);
        std::cout << "wrote " << (runs.size() + 1) << " files to " << opt.out_dir << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

int cmd_report(const std::string& dir) {
    try {
        std::vector<cfssm::csv::SummaryRow> rows;
        if (!fs::exists(dir)) throw cfssm::InvalidInputError("no such directory '" + dir + "'");
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().filename() == "summary.csv") {
                const auto part = cfssm::csv::read_summary(entry.path().string());
                rows.insert(rows.end(), part.begin(), part.end());
            }
        }
        if (rows.empty())
            throw cfssm::InvalidInputError("no summary.csv found under '" + dir + "'");
        std::cout << cfssm::csv::render_table(rows);
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

int cmd_verify(const std::string& property) {
    std::vector<cfssm::verify::PropertyResult> results;
    try {
        results = cfssm::verify::run_all(property);
    } catch (const cfssm::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " — " << r.detail << "\n";
        all_ok = all_ok && r.passed;
    }
    return all_ok ? exit_ok : exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-switching Bayesian filtering benchmark"};
    app.require_subcommand(1);

    RunOptions opt;
    CLI::App* run = app.add_subcommand("run", "run one scenario and write CSV results");
    run->add_option("--scenario", opt.scenario, "scenario name (exp4_1..exp4_4)")->required();
    run->add_option("--methods", opt.methods,
                    "subset of methods (cf, imm, fixed_<label>); default: all")
        ->delimiter(',');
    run->add_option("--runs", opt.runs, "Monte-Carlo run count override");
    run->add_option("--seed", opt.seed, "master seed (fallback: CF_SSM_SEED, then 42)");
    run->add_option("--out", opt.out_dir, "output directory (default: results)");
    run->add_option("--parallelism", opt.parallelism, "worker threads (default: hardware)");
    run->add_option("--delta", opt.delta, "hysteresis margin override");
    run->add_option("--window", opt.window, "score window override");
    run->add_option("--particles", opt.particles, "particle count override");
    run->add_option("--horizon", opt.horizon, "horizon override");
    run->add_option("--process-var", opt.process_var, "process noise variance override");
    run->add_option("--obs-var", opt.obs_var, "observation noise variance override");
    run->add_option("--init-var", opt.init_var, "initial state variance override");
    run->add_option("--config", opt.config_file, "JSON config file (flags take precedence)");

    std::string report_dir = "results";
    CLI::App* report = app.add_subcommand("report", "merge summary.csv files into one table");
    report->add_option("--out", report_dir, "directory to scan for summary.csv files");

    std::string property;
    CLI::App* verify = app.add_subcommand("verify", "run the theory property suite");
    verify->add_option("--property", property, "run a single named property");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    if (run->parsed()) return cmd_run(std::move(opt));
    if (report->parsed()) return cmd_report(report_dir);
    if (verify->parsed()) return cmd_verify(property);
    return exit_usage;
}
