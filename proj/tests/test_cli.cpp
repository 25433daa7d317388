#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "hqmsa/hqmsa.hpp"

using namespace hqmsa;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = HQMSA_SOURCE_DIR;

Json base() {
    return Json{{"schema_version", 1},
                {"instance", "q4"},
                {"optimizer", {{"iterations", 8}, {"shots", 500}}},
                {"seeds", {3, 4}}};
}

std::string config_error_field(const Json& j) {
    try {
        (void)parse_scenario(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    }
    return files;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("hqmsa_test_" + name);
    fs::remove_all(p);
    return p;
}

int run_cli(const std::string& args, const fs::path& err = {}) {
    std::string cmd = std::string(HQMSA_CLI) + " " + args + " > /dev/null";
    if (!err.empty()) cmd += " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsAndSources) {
    const auto c = parse_scenario(base());
    EXPECT_EQ(c.sequences, (std::vector<std::string>{"AG", "AG"}));
    EXPECT_EQ(c.ansatz.qubits, 4u);
    EXPECT_EQ(c.optimizer.max_iters, 8u);
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
    EXPECT_EQ(c.penalty, 1.5);

    auto j = base();
    j.erase("instance");
    j["sequences"] = {"AKGT", "AGT"};
    j["seeds"] = {{"count", 3}, {"start", 10}};
    const auto d = parse_scenario(j);
    EXPECT_EQ(d.ansatz.qubits, 8u);
    EXPECT_EQ(d.seeds, (std::vector<std::uint64_t>{10, 11, 12}));

    const auto f = load_scenario(kSource / "scenarios" / "fig3c.json");
    EXPECT_EQ(f.sequences, (std::vector<std::string>{"ACGTCAT", "ACGGTTAT"}));
    EXPECT_EQ(f.ansatz.qubits, 20u);
}

TEST(Config, FieldLevelErrors) {
    auto j = base();
    j["bogus"] = 1;
    EXPECT_EQ(config_error_field(j), "bogus");
    j = base();
    j["optimizer"]["shots"] = 0;
    EXPECT_EQ(config_error_field(j), "optimizer.shots");
    j = base();
    j["optimizer"]["adam"] = {{"stepp", 0.1}};
    EXPECT_EQ(config_error_field(j), "optimizer.adam.stepp");
    j = base();
    j["cvar"] = {{"r0", 1.5}};
    EXPECT_EQ(config_error_field(j), "cvar.r0");
    j = base();
    j["noise"] = {{"single_qubit_rate", 1.0}};
    EXPECT_EQ(config_error_field(j), "noise.single_qubit_rate");
    j = base();
    j["noise"] = {{"single_qubit_rate", 0.01}};
    EXPECT_EQ(config_error_field(j), "optimizer.method");
    j = base();
    j["sequences"] = {"AG", "AG"};
    EXPECT_EQ(config_error_field(j), "sequences");
    j = base();
    j["instance"] = "q99";
    EXPECT_EQ(config_error_field(j), "instance");
    j = base();
    j.erase("schema_version");
    EXPECT_EQ(config_error_field(j), "schema_version");
    j = base();
    j["study"] = {{"kind", "nope"}};
    EXPECT_EQ(config_error_field(j), "study.kind");
    j = base();
    j["clamp_reference"] = true;
    EXPECT_EQ(config_error_field(j), "clamp_reference");
    j = base();
    j["ansatz"] = {{"kind", "qaoa"}};
    j["optimizer"]["method"] = "parameter-shift";
    EXPECT_EQ(config_error_field(j), "optimizer.method");
    j = base();
    j.erase("instance");
    j["sequences"] = {"AAKGT", "AT", "AKG", "KT", "AKGTA"};
    EXPECT_EQ(config_error_field(j), "sequences");  // 25 qubits
}

TEST(Config, ResolvedRoundTrip) {
    auto j = base();
    j["cvar"] = {{"r0", 0.7}, {"warmup", 3}};
    j["study"] = {{"kind", "cvar-compare"}};
    const auto c = parse_scenario(j);
    const auto again = parse_scenario(to_json(c));
    EXPECT_EQ(to_json(again).dump(), to_json(c).dump());
}

TEST(Study, ArmsPerKind) {
    auto c = parse_scenario(base());
    EXPECT_EQ(study_arms(c, StudyKind::EntanglementSweep).size(), 4u);
    const auto cv = study_arms(c, StudyKind::CvarCompare);
    EXPECT_EQ(cv[0].cvar.r0, 0.6);
    EXPECT_EQ(cv[0].cvar.warmup_iters, 100u);
    EXPECT_EQ(cv[1].cvar.r0, 1.0);
    c.optimizer.method = GradientMethod::ParameterShift;
    const auto qh = study_arms(c, StudyKind::QaoaVsHea);
    EXPECT_EQ(qh[1].ansatz.kind, AnsatzKind::Qaoa);
    EXPECT_EQ(qh[1].optimizer.method, GradientMethod::Adjoint);
    const auto nc = study_arms(c, StudyKind::NoiseCompare);
    EXPECT_EQ(nc.size(), 3u);
    EXPECT_TRUE(nc[0].noise.noiseless());
    EXPECT_EQ(nc[1].optimizer.method, GradientMethod::Spsa);
    EXPECT_TRUE(nc[1].noise.gate_noise());
}

TEST(Study, AggregatesRecomputable) {
    auto j = base();
    j["seeds"] = {{"count", 4}};
    const auto c = parse_scenario(j);
    const auto r = run_study(StudyKind::EntanglementSweep, c);
    ASSERT_EQ(r.arms.size(), 4u);
    EXPECT_EQ(r.comparisons.size(), 3u);
    for (const auto& a : r.arms) {
        const auto f = a.final_energies();
        EXPECT_DOUBLE_EQ(a.mean_final, stats::mean(f));
        std::size_t hits = 0;
        for (const auto& s : a.seeds) hits += s.final_ground_probability >= kHitThreshold;
        EXPECT_DOUBLE_EQ(a.hit_rate, double(hits) / 4.0);
    }
}

TEST(Study, IndependentOfWorkerCount) {
    auto j = base();
    j["seeds"] = {{"count", 3}};
    const auto c = parse_scenario(j);
    const Problem p = make_problem(c);
    ExecutionOptions one, three;
    one.workers = 1;
    three.workers = 3;
    const auto a = run_study(StudyKind::CvarCompare, c, one);
    const auto b = run_study(StudyKind::CvarCompare, c, three);
    std::ostringstream x, y;
    write_seeds_csv(x, a, p);
    write_seeds_csv(y, b, p);
    EXPECT_EQ(x.str(), y.str());
}

TEST(Outputs, ByteIdenticalReruns) {
    const auto dir1 = scratch("rerun1"), dir2 = scratch("rerun2");
    auto c = parse_scenario(base());
    c.seeds = {7};
    const Problem p = make_problem(c);
    write_results(dir1, c, run_scenario(c), p);
    write_results(dir2, c, run_scenario(c), p);
    const auto a = snapshot(dir1), b = snapshot(dir2);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.count("config.json"));
    EXPECT_TRUE(a.count("summary.json"));
    EXPECT_TRUE(a.count("run/seed_7_histogram.csv"));
    EXPECT_TRUE(a.count("run/seed_7_trace.jsonl"));
    EXPECT_FALSE(a.count("timing.csv"));
    // the embedded config reproduces the run
    const auto again = parse_scenario(Json::parse(a.at("config.json")));
    const auto dir3 = scratch("rerun3");
    write_results(dir3, again, run_scenario(again), p);
    EXPECT_EQ(snapshot(dir3), a);
}

TEST(Outputs, HistogramIsFullAndTagged) {
    auto c = parse_scenario(base());
    c.seeds = {1};
    const auto r = run_scenario(c);
    const auto dir = scratch("hist");
    write_results(dir, c, r, make_problem(c));
    const auto csv = slurp(dir / "run" / "seed_1_histogram.csv");
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    EXPECT_EQ(static_cast<std::size_t>(lines), r.arms[0].seeds[0].trace.final_shots.counts().size() + 1);
    EXPECT_EQ(csv.find("unknown"), std::string::npos);
}

TEST(Cli, RunAndErrorRecord) {
    const auto out = scratch("cli_run");
    const auto cfg = out.string() + ".json";
    std::ofstream(cfg) << base().dump();
    EXPECT_EQ(run_cli("run --config " + cfg + " --seed 2 --shots 300 --out-dir " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "run" / "seed_2_trace.csv"));
    const auto resolved = Json::parse(slurp(out / "config.json"));
    EXPECT_EQ(resolved["optimizer"]["shots"], 300);

    const auto err = scratch("cli_err.txt");
    auto bad = base();
    bad["optimizer"]["shots"] = -1;
    std::ofstream(cfg) << bad.dump();
    EXPECT_NE(run_cli("run --config " + cfg, err), 0);
    const auto rec = Json::parse(slurp(err));
    EXPECT_EQ(rec["error"]["kind"], "config");
    EXPECT_EQ(rec["error"]["field"], "optimizer.shots");

    EXPECT_NE(run_cli("frobnicate", err), 0);
    EXPECT_EQ(Json::parse(slurp(err))["error"]["kind"], "usage");
    EXPECT_NE(run_cli("run --config /nonexistent.json", err), 0);
    EXPECT_EQ(Json::parse(slurp(err))["error"]["kind"], "io");
}

TEST(Cli, OracleAndTiming) {
    const auto out = scratch("cli_oracle");
    EXPECT_EQ(run_cli("oracle --instance q8 --table csv --out-dir " + out.string()), 0);
    const auto m = Json::parse(slurp(out / "minima.json"));
    EXPECT_TRUE(fs::exists(out / "landscape_nodes.csv"));
    EXPECT_TRUE(fs::exists(out / "landscape_edges.csv"));
    EXPECT_TRUE(fs::exists(out / "energy_table.csv"));
    EXPECT_EQ(m["global_minimum"].get<double>(), *make_problem(parse_scenario(Json{{"schema_version", 1}, {"instance", "q8"}})).table_minimum());

    const auto t = scratch("cli_timing");
    EXPECT_EQ(run_cli("timing --instances q4 q8 --iterations 2 --out-dir " + t.string()), 0);
    const auto csv = slurp(t / "timing_report.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_TRUE(fs::exists(t / "timing_raw.csv"));
}

TEST(Timing, RecomputableFromRawSamples) {
    auto c = parse_scenario(base());
    c.seeds = {0, 1};
    const auto rows = timing_report(c, {"q4", "q8"}, 3);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.samples.size(), 6u);
        EXPECT_DOUBLE_EQ(r.mean_seconds, stats::mean(r.samples));
    }
}

TEST(Config, ShippedScenariosParse) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(kSource / "scenarios")) {
        if (e.path().extension() != ".json") continue;
        EXPECT_NO_THROW((void)load_scenario(e.path())) << e.path();
        ++n;
    }
    EXPECT_GE(n, 5u);
}
