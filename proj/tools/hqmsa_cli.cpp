// hqmsa: run | study | oracle | timing

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqmsa/hqmsa.hpp"

namespace fs = std::filesystem;
using namespace hqmsa;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> shots;
    std::optional<std::string> format;
    std::size_t workers = 0;
    bool quiet = false;
};

void add_common(CLI::App* app, Overrides& o, bool config_required) {
    auto* c = app->add_option("--config", o.config, "scenario JSON file");
    if (config_required) c->required();
    app->add_option("--seed", o.seed, "run this single seed instead of the configured list");
    app->add_option("--out-dir", o.out_dir, "output directory (overrides outputs.directory)");
    app->add_option("--shots", o.shots, "shots per evaluation (overrides optimizer.shots)");
    app->add_option("--format", o.format, "write only this format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--workers", o.workers, "worker threads (0: all cores)");
    app->add_flag("--quiet", o.quiet, "no console summary");
}

ScenarioConfig default_scenario(const std::string& instance) {
    return parse_scenario(Json{{"schema_version", kSchemaVersion}, {"instance", instance}});
}

ScenarioConfig load(const Overrides& o) {
    ScenarioConfig c = o.config.empty() ? default_scenario("q4") : load_scenario(o.config);
    if (o.seed) c.seeds = {*o.seed};
    if (o.out_dir) c.outputs.directory = *o.out_dir;
    if (o.shots) {
        if (*o.shots == 0) throw ConfigError("--shots", "must be at least 1");
        c.optimizer.shots = *o.shots;
    }
    if (o.format) {
        c.outputs.json = *o.format == "json";
        c.outputs.csv = *o.format == "csv";
    }
    return c;
}

void finish(const ScenarioConfig& c, const StudyResult& r, const Problem& problem, bool quiet) {
    const auto files = write_results(c.outputs.directory, c, r, problem);
    if (!quiet) {
        print_summary(std::cout, c, r, problem);
        std::cout << "wrote " << files.size() << " files to " << c.outputs.directory.string() << '\n';
    }
}

ExecutionOptions execution(const ScenarioConfig& c, const Overrides& o) {
    ExecutionOptions e;
    e.workers = o.workers;
    e.run.keep_shot_tables = c.outputs.all_shot_tables;
    return e;
}

int cmd_run(const Overrides& o) {
    const auto c = load(o);
    const auto r = run_scenario(c, execution(c, o));
    finish(c, r, make_problem(c), o.quiet);
    return 0;
}

int cmd_study(const Overrides& o, const std::optional<std::string>& kind) {
    auto c = load(o);
    if (kind) c.study.kind = parse_study_kind(*kind, "--kind");
    if (!c.study.kind) throw ConfigError("study.kind", "no study kind in the config and no --kind given");
    const auto r = run_study(*c.study.kind, c, execution(c, o));
    finish(c, r, make_problem(c), o.quiet);
    return 0;
}

Json minima_json(const MinimaReport& m, const Problem& problem) {
    auto states = [&](const std::vector<MinimumState>& v) {
        Json a = Json::array();
        for (const auto& s : v) a.push_back(Json{{"bitstring", problem.bitstring(s.index)}, {"energy", s.energy}});
        return a;
    };
    Json mins = Json::array();
    for (auto x : m.minimizers) {
        mins.push_back(Json{{"bitstring", problem.bitstring(x)},
                            {"index", problem.expand(x)},
                            {"alignment", problem.alignment(x).rows}});
    }
    return Json{{"qubits", problem.full_qubits()},
                {"register_qubits", m.qubits},
                {"feasible_only", m.feasible_only},
                {"global_minimum", m.global_minimum},
                {"minimizers", mins},
                {"local_minima", states(m.local_minima)},
                {"flat", states(m.flat)}};
}

int cmd_oracle(const Overrides& o, const std::optional<std::string>& instance, bool feasible_only,
               const std::string& table_format) {
    if (!o.config.empty() && instance) throw ConfigError("--instance", "give either --config or --instance");
    ScenarioConfig c = instance ? default_scenario(*instance) : load(o);
    if (instance && o.out_dir) c.outputs.directory = *o.out_dir;
    const Problem problem = make_problem(c);
    const auto report = brute_force_min(problem, feasible_only);
    const fs::path dir = c.outputs.directory;
    fs::create_directories(dir);
    std::ofstream(dir / "minima.json", std::ios::binary) << minima_json(report, problem).dump(2) << '\n';
    std::size_t files = 1;
    if (problem.register_qubits() <= kLandscapeExportCap) {
        const auto g = build_landscape(problem, feasible_only);
        std::ofstream nodes(dir / "landscape_nodes.csv", std::ios::binary);
        write_landscape_nodes_csv(nodes, g, problem);
        std::ofstream edges(dir / "landscape_edges.csv", std::ios::binary);
        write_landscape_edges_csv(edges, g, problem);
        files += 2;
    }
    if (table_format == "csv") {
        std::ofstream t(dir / "energy_table.csv", std::ios::binary);
        write_energy_table_csv(t, problem.table());
        ++files;
    } else if (table_format == "binary") {
        std::ofstream t(dir / "energy_table.bin", std::ios::binary);
        write_energy_table_binary(t, problem.table());
        ++files;
    }
    if (!o.quiet) {
        std::cout << "global minimum " << fmt(report.global_minimum) << " over " << report.qubits
                  << " qubits; " << report.minimizers.size() << " minimizer(s), " << report.local_minima.size()
                  << " strict local minima, " << report.flat.size() << " flat states\n";
        for (std::size_t k = 0; k < report.minimizers.size() && k < 10; ++k) {
            const auto x = report.minimizers[k];
            std::cout << "  " << problem.bitstring(x) << '\n';
            for (const auto& row : problem.alignment(x).rows) std::cout << "    " << row << '\n';
        }
        std::cout << "wrote " << files << " files to " << dir.string() << '\n';
    }
    return 0;
}

int cmd_timing(const Overrides& o, const std::vector<std::string>& instances, std::size_t iterations) {
    const auto c = load(o);
    if (iterations == 0) throw ConfigError("--iterations", "must be at least 1");
    for (const auto& name : instances) {
        try {
            (void)find_instance(name);
        } catch (const InputError& e) {
            throw ConfigError("--instances", e.what());
        }
    }
    const auto rows = timing_report(c, instances, iterations);
    const fs::path dir = c.outputs.directory;
    fs::create_directories(dir);
    std::ofstream summary(dir / "timing_report.csv", std::ios::binary);
    write_timing_csv(summary, rows);
    std::ofstream raw(dir / "timing_raw.csv", std::ios::binary);
    write_timing_raw_csv(raw, rows);
    if (!o.quiet) write_timing_csv(std::cout, rows);
    return 0;
}

void error_record(std::string_view kind, const std::string& message, const std::string& field = {}) {
    Json e{{"kind", kind}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    std::cerr << Json{{"error", e}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid quantum-classical multiple sequence alignment (statevector simulation)"};
    app.require_subcommand(1);

    Overrides run_o, study_o, oracle_o, timing_o;
    auto* run = app.add_subcommand("run", "run a scenario: one VQE per seed");
    add_common(run, run_o, true);

    auto* study = app.add_subcommand("study", "run a study protocol over the scenario's seeds");
    add_common(study, study_o, true);
    std::optional<std::string> kind;
    study->add_option("--kind", kind, "entanglement-sweep | cvar-compare | qaoa-vs-hea | noise-compare");

    auto* oracle = app.add_subcommand("oracle", "exhaustive minimum, local minima and landscape graph");
    add_common(oracle, oracle_o, false);
    std::optional<std::string> instance;
    bool feasible_only = false;
    std::string table_format = "none";
    oracle->add_option("--instance", instance, "built-in instance instead of --config");
    oracle->add_flag("--feasible-only", feasible_only, "restrict to zero-penalty states");
    oracle->add_option("--table", table_format, "also write the energy table")
        ->check(CLI::IsMember({"none", "csv", "binary"}));

    auto* timing = app.add_subcommand("timing", "mean wall time per iteration on the stand-in sizes");
    add_common(timing, timing_o, false);
    std::vector<std::string> instances{"q4", "q8", "q12", "q16"};
    std::size_t iterations = 5;
    timing->add_option("--instances", instances, "built-in instances to time");
    timing->add_option("--iterations", iterations, "optimizer steps per seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_record("usage", e.what());
        return 2;
    }

    try {
        if (*run) return cmd_run(run_o);
        if (*study) return cmd_study(study_o, kind);
        if (*oracle) return cmd_oracle(oracle_o, instance, feasible_only, table_format);
        return cmd_timing(timing_o, instances, iterations);
    } catch (const ConfigError& e) {
        error_record("config", e.what(), e.field());
    } catch (const Error& e) {
        error_record(to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
        error_record("internal", e.what());
    }
    return 1;
}
