// Command-line driver for the source-placement bandit experiments.
//
// Subcommands: generate-graph, best-arm, run-regret, run-error-study,
// run-solver-bench, show-bounds. Each reads an optional key-value config
// file, applies CLI overrides, writes CSV results plus a JSON metadata
// sidecar into --out-dir, and exits nonzero with a diagnostic on any
// config or validation error.

#include <grabucb/harness.hpp>
#include <grabucb/reports.hpp>
#include <grabucb/version.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace grabucb;
using namespace grabucb::bench;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    int threads = 0;
    std::vector<std::string> overrides;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "key-value config file");
    cmd->add_option("--seed", args.seeds, "run seed(s); overrides run.seeds");
    cmd->add_option("--out-dir", args.out_dir, "output directory; overrides run.out_dir");
    cmd->add_option("--threads", args.threads, "worker threads; overrides run.threads");
    cmd->add_option("--set", args.overrides,
                    "generic 'section.key=value' config override (repeatable)");
}

ExperimentConfig load_config(const CommonArgs& args) {
    KeyValueConfig kv;
    if (!args.config_path.empty()) kv = KeyValueConfig::parse_file(args.config_path);
    for (const std::string& item : args.overrides) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects 'section.key=value', got '" + item +
                                        "'");
        }
        kv.set(item.substr(0, eq), item.substr(eq + 1));
    }
    if (!args.seeds.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < args.seeds.size(); ++i) {
            if (i) joined += ",";
            joined += std::to_string(args.seeds[i]);
        }
        kv.set("run.seeds", joined);
    }
    if (!args.out_dir.empty()) kv.set("run.out_dir", args.out_dir);
    if (args.threads > 0) kv.set("run.threads", std::to_string(args.threads));
    return ExperimentConfig::from_key_values(kv);
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    writer(os);
}

struct PhaseClock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double take_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - start).count();
        start = now;
        return ms;
    }
};

void finish(const ExperimentConfig& cfg, const std::string& command,
            const PhaseTimings& timings, const std::vector<std::string>& outputs) {
    const fs::path dir(cfg.out_dir);
    const fs::path meta = dir / (command + "_meta.json");
    write_file(meta, [&](std::ostream& os) {
        write_metadata_json(os, cfg, command, timings, outputs);
    });
    for (const std::string& out : outputs) std::cout << "wrote " << out << "\n";
    std::cout << "wrote " << meta.string() << "\n";
}

int cmd_generate_graph(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    PhaseClock clock;
    std::vector<std::string> outputs;
    for (std::uint64_t seed : cfg.seeds) {
        const Instance inst = build_instance(cfg, seed);
        const fs::path path = dir / ("graph_seed" + std::to_string(seed) + ".txt");
        save_edge_list(path.string(), inst.env.graph);
        outputs.push_back(path.string());
        std::cout << "seed " << seed << ": n=" << inst.env.nodes()
                  << " d=" << csv_double(inst.hyper.power_sum_d) << "\n";
    }
    finish(cfg, "generate_graph", {{"generate", clock.take_ms()}}, outputs);
    return 0;
}

int cmd_best_arm(const CommonArgs& args, const std::string& method) {
    const ExperimentConfig cfg = load_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    PhaseClock clock;
    std::vector<std::string> outputs;
    for (std::uint64_t seed : cfg.seeds) {
        const Instance inst = build_instance(cfg, seed);
        OracleArm oracle;
        if (method == "enumerate") {
            oracle = oracle_best_arm(inst.env, cfg.action_budget, OracleMethod::Enumerate,
                                     cfg.enumeration_budget);
        } else if (method == "walk") {
            oracle = oracle_best_arm(inst.env, cfg.action_budget, OracleMethod::Walk);
        } else {
            oracle = oracle_best_arm_auto(inst.env, cfg.action_budget, cfg.enumeration_budget);
        }
        std::cout << "seed " << seed << ": r*=" << csv_double(oracle.reward) << " support=";
        for (std::size_t i = 0; i < oracle.arm.support.size(); ++i) {
            std::cout << (i ? ";" : "") << oracle.arm.support[i];
        }
        std::cout << (oracle.exact ? " (exact)" : " (walk)") << "\n";
        const fs::path path = dir / ("best_arm_seed" + std::to_string(seed) + ".csv");
        write_file(path, [&](std::ostream& os) {
            write_node_values_csv(os, inst.env, oracle.arm);
        });
        outputs.push_back(path.string());
    }
    finish(cfg, "best_arm", {{"solve", clock.take_ms()}}, outputs);
    return 0;
}

int cmd_run_regret(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    std::vector<std::string> outputs;
    PhaseTimings timings;

    for (const std::string& algo : cfg.algorithms) {
        PhaseClock clock;
        std::vector<RunRecord> records;
        if (algo == "grab") {
            records = run_seeds(cfg, [&](std::uint64_t s) { return run_grab_ucb(cfg, s); });
        } else if (algo == "grab_greedy") {
            ExperimentConfig greedy = cfg;
            greedy.use_confidence = false;
            records = run_seeds(greedy,
                                [&](std::uint64_t s) { return run_grab_ucb(greedy, s); });
        } else if (algo == "aal_short") {
            records = run_seeds(
                cfg, [&](std::uint64_t s) { return run_aal(cfg, s, cfg.aal_explore_short); });
        } else if (algo == "aal_long") {
            records = run_seeds(
                cfg, [&](std::uint64_t s) { return run_aal(cfg, s, cfg.aal_explore_long); });
        } else {
            throw std::invalid_argument(
                "config field 'run.algorithms': unknown algorithm '" + algo +
                "' (expected grab|grab_greedy|aal_short|aal_long)");
        }
        const fs::path path = dir / ("regret_" + algo + ".csv");
        write_file(path, [&](std::ostream& os) { write_regret_csv(os, records); });
        outputs.push_back(path.string());
        if (cfg.dump_traces) {
            for (const RunRecord& record : records) {
                const fs::path trace = dir / ("trace_" + algo + "_seed" +
                                              std::to_string(record.seed) + ".csv");
                write_file(trace,
                           [&](std::ostream& os) { write_trace_csv(os, record); });
                outputs.push_back(trace.string());
            }
        }
        double final_mean = 0.0;
        for (const RunRecord& record : records) {
            final_mean += cumulative_regret(record).back();
        }
        final_mean /= static_cast<double>(records.size());
        std::cout << algo << ": mean cumulative regret at T=" << cfg.horizon << " is "
                  << csv_double(final_mean) << " over " << records.size() << " seeds\n";
        timings.emplace_back(algo, clock.take_ms());
    }
    finish(cfg, "run_regret", timings, outputs);
    return 0;
}

int cmd_run_error_study(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    PhaseClock clock;
    const std::vector<StudyPoint> points = run_error_study(cfg);
    for (const StudyPoint& p : points) {
        std::cout << cfg.study_sweep << "=" << csv_double(p.parameter)
                  << " mean_error=" << csv_double(p.mean_error) << " stderr="
                  << csv_double(p.stderr_error) << "\n";
    }
    const fs::path path = dir / "error_study.csv";
    write_file(path, [&](std::ostream& os) { write_study_csv(os, points); });
    finish(cfg, "run_error_study", {{"study", clock.take_ms()}}, {path.string()});
    return 0;
}

int cmd_run_solver_bench(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    PhaseClock clock;
    const std::vector<SolverBenchRow> rows = solver_bench(cfg);
    for (const SolverBenchRow& row : rows) {
        std::cout << "n=" << row.nodes << " " << row.method << ": ";
        if (row.skipped) {
            std::cout << "skipped (over enumeration budget)\n";
        } else {
            std::cout << csv_double(row.time_ms) << " ms, reward "
                      << csv_double(row.reward) << "\n";
        }
    }
    const fs::path path = dir / "solver_bench.csv";
    write_file(path, [&](std::ostream& os) { write_solver_csv(os, rows); });
    finish(cfg, "run_solver_bench", {{"bench", clock.take_ms()}}, {path.string()});
    return 0;
}

int cmd_show_bounds(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    PhaseClock clock;
    const std::vector<BoundsRow> rows = bounds_trajectory(cfg, cfg.seeds.front());
    for (const BoundsRow& row : rows) {
        std::cout << "t=" << row.t << " c_exact=" << csv_double(row.radius_exact)
                  << " c_lemma=" << csv_double(row.radius_lemma)
                  << " logdet=" << csv_double(row.gram_logdet)
                  << " regret_bound=" << csv_double(row.regret_bound_at_t) << "\n";
    }
    const fs::path path = dir / "bounds.csv";
    write_file(path, [&](std::ostream& os) { write_bounds_csv(os, rows); });
    finish(cfg, "show_bounds", {{"bounds", clock.take_ms()}}, {path.string()});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"network source-placement bandit simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    std::string best_arm_method = "auto";

    CLI::App* generate = app.add_subcommand("generate-graph", "write generated graphs as edge lists");
    add_common_options(generate, args);

    CLI::App* best = app.add_subcommand("best-arm", "oracle best arm under the true kernel");
    add_common_options(best, args);
    best->add_option("--method", best_arm_method, "enumerate|walk|auto (default auto)");

    CLI::App* regret = app.add_subcommand("run-regret", "cumulative-regret experiment across seeds");
    add_common_options(regret, args);

    CLI::App* study = app.add_subcommand("run-error-study", "estimation-error sweep");
    add_common_options(study, args);

    CLI::App* solver = app.add_subcommand("run-solver-bench", "walk vs enumeration timing benchmark");
    add_common_options(solver, args);

    CLI::App* bounds = app.add_subcommand("show-bounds", "confidence radius and regret bound trajectories");
    add_common_options(bounds, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate_graph(args);
        if (best->parsed()) return cmd_best_arm(args, best_arm_method);
        if (regret->parsed()) return cmd_run_regret(args);
        if (study->parsed()) return cmd_run_error_study(args);
        if (solver->parsed()) return cmd_run_solver_bench(args);
        if (bounds->parsed()) return cmd_show_bounds(args);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
