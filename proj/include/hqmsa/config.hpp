#pragma once

// Scenario configuration: a JSON document (schema_version 1). Every object
// is checked for unknown keys and every value against the module
// preconditions before anything is computed; errors name the offending field.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hqmsa/align_core.hpp"
#include "hqmsa/circuit.hpp"
#include "hqmsa/error.hpp"
#include "hqmsa/fasta.hpp"
#include "hqmsa/instances.hpp"
#include "hqmsa/optimizer.hpp"

namespace hqmsa {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class StudyKind { EntanglementSweep, CvarCompare, QaoaVsHea, NoiseCompare };

[[nodiscard]] inline std::string to_string(StudyKind k) {
    switch (k) {
        case StudyKind::EntanglementSweep: return "entanglement-sweep";
        case StudyKind::CvarCompare: return "cvar-compare";
        case StudyKind::QaoaVsHea: return "qaoa-vs-hea";
        default: return "noise-compare";
    }
}

[[nodiscard]] inline StudyKind parse_study_kind(const std::string& s, const std::string& field = "study.kind") {
    if (s == "entanglement-sweep") return StudyKind::EntanglementSweep;
    if (s == "cvar-compare") return StudyKind::CvarCompare;
    if (s == "qaoa-vs-hea") return StudyKind::QaoaVsHea;
    if (s == "noise-compare") return StudyKind::NoiseCompare;
    throw ConfigError(field, "unknown study kind '" + s +
                                 "' (expected entanglement-sweep, cvar-compare, qaoa-vs-hea or noise-compare)");
}

struct StudyConfig {
    std::optional<StudyKind> kind;
    std::vector<std::size_t> layers{0, 1, 2, 3};  // entanglement-sweep
    double warm_r0 = 0.6;                          // cvar-compare
    std::size_t warmup = 100;
    std::size_t qaoa_rounds = 20;                  // qaoa-vs-hea
    std::size_t hea_layers = 2;
    NoiseConfig noise{1e-3, 1e-3, 1e-3, 10};       // noisy arm of noise-compare
};

struct OutputConfig {
    std::filesystem::path directory = "out";
    bool json = true;
    bool csv = true;
    bool all_shot_tables = false;  // every iteration's table inside the trace output
    bool timing = false;           // timing.csv (not byte-reproducible, hence opt-in)
    std::size_t top = 10;          // histogram rows echoed to the console
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::string instance;                 // built-in name, empty for inline/fasta
    std::vector<std::string> sequences;   // resolved residues
    std::optional<std::string> fasta;     // source path, kept for the resolved config
    std::optional<std::size_t> columns;
    std::optional<std::size_t> reference;
    bool clamp_reference = false;
    double penalty = PenaltyParam::kDefault;
    AnsatzSpec ansatz;                    // qubits filled from the problem
    OptimizerConfig optimizer;
    CvarConfig cvar;
    NoiseConfig noise{0.0, 0.0, 0.0, 10};
    std::vector<std::uint64_t> seeds{0};
    StudyConfig study;
    OutputConfig outputs;

    [[nodiscard]] SequenceSet sequence_set() const { return SequenceSet(sequences, columns, reference); }
};

namespace config_detail {

inline void check_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

inline std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

inline double get_number(const Json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
    return v.get<double>();
}

inline std::uint64_t get_uint(const Json& obj, const std::string& path, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(join(path, key), "must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline bool get_bool(const Json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(join(path, key), "must be true or false");
    return v.get<bool>();
}

inline std::string get_string(const Json& obj, const std::string& path, const char* key, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
    return v.get<std::string>();
}

inline NoiseConfig parse_noise(const Json& j, const std::string& path, NoiseConfig base) {
    check_keys(j, path, {"single_qubit_rate", "two_qubit_rate", "readout_flip", "trajectories"});
    base.single_qubit_rate = get_number(j, path, "single_qubit_rate", base.single_qubit_rate);
    base.two_qubit_rate = get_number(j, path, "two_qubit_rate", base.two_qubit_rate);
    base.readout_flip = get_number(j, path, "readout_flip", base.readout_flip);
    base.trajectories = get_uint(j, path, "trajectories", base.trajectories);
    auto rate = [&](const char* key, double v) {
        if (!(v >= 0.0 && v < 1.0)) throw ConfigError(join(path, key), "rate must lie in [0, 1)");
    };
    rate("single_qubit_rate", base.single_qubit_rate);
    rate("two_qubit_rate", base.two_qubit_rate);
    rate("readout_flip", base.readout_flip);
    if (base.trajectories == 0) throw ConfigError(join(path, "trajectories"), "must be at least 1");
    return base;
}

inline Json noise_json(const NoiseConfig& n) {
    return Json{{"single_qubit_rate", n.single_qubit_rate},
                {"two_qubit_rate", n.two_qubit_rate},
                {"readout_flip", n.readout_flip},
                {"trajectories", n.trajectories}};
}

inline GradientMethod parse_method(const std::string& s) {
    if (s == "adjoint") return GradientMethod::Adjoint;
    if (s == "parameter-shift") return GradientMethod::ParameterShift;
    if (s == "finite-difference") return GradientMethod::FiniteDifference;
    if (s == "spsa") return GradientMethod::Spsa;
    throw ConfigError("optimizer.method",
                      "unknown method '" + s + "' (expected adjoint, parameter-shift, finite-difference or spsa)");
}

}  // namespace config_detail

/// Parses and validates a scenario. Relative FASTA paths resolve against
/// `base_dir` (the config file's directory).
[[nodiscard]] inline ScenarioConfig parse_scenario(const Json& j, const std::filesystem::path& base_dir = {}) {
    using namespace config_detail;
    check_keys(j, "", {"schema_version", "name", "instance", "sequences", "fasta", "columns", "reference",
                       "clamp_reference", "penalty", "ansatz", "optimizer", "cvar", "noise", "seeds", "study",
                       "outputs"});
    if (!j.contains("schema_version")) throw ConfigError("schema_version", "is required");
    if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kSchemaVersion) {
        throw ConfigError("schema_version", "unsupported version (this build reads version 1)");
    }
    ScenarioConfig c;
    c.name = get_string(j, "", "name", c.name);

    const int sources = int(j.contains("instance")) + int(j.contains("sequences")) + int(j.contains("fasta"));
    if (sources != 1) throw ConfigError("sequences", "give exactly one of 'instance', 'sequences' or 'fasta'");
    if (j.contains("instance")) {
        c.instance = get_string(j, "", "instance", "");
        const NamedInstance* inst = nullptr;
        try {
            inst = &find_instance(c.instance);
        } catch (const InputError& e) {
            throw ConfigError("instance", e.what());
        }
        c.sequences = inst->sequences;
        c.columns = inst->columns;
        c.reference = inst->reference;
    } else if (j.contains("sequences")) {
        const auto& s = j.at("sequences");
        if (!s.is_array() || s.empty()) throw ConfigError("sequences", "must be a non-empty array of strings");
        for (const auto& e : s) {
            if (!e.is_string()) throw ConfigError("sequences", "must be a non-empty array of strings");
            c.sequences.push_back(e.get<std::string>());
        }
    } else {
        c.fasta = get_string(j, "", "fasta", "");
        std::filesystem::path p(*c.fasta);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        try {
            for (auto& r : read_fasta(p)) c.sequences.push_back(r.sequence);
        } catch (const Error& e) {
            throw ConfigError("fasta", e.what());
        }
    }
    if (c.sequences.size() < 2) throw ConfigError("sequences", "a scenario needs at least two sequences");
    if (j.contains("columns")) c.columns = get_uint(j, "", "columns", 0);
    if (j.contains("reference")) c.reference = get_uint(j, "", "reference", 0);
    c.clamp_reference = get_bool(j, "", "clamp_reference", false);
    c.penalty = get_number(j, "", "penalty", c.penalty);
    if (!(c.penalty > 0.0) || !std::isfinite(c.penalty)) {
        throw ConfigError("penalty", "must be a positive finite number");
    }
    SequenceSet set;
    try {
        set = c.sequence_set();
    } catch (const Error& e) {
        throw ConfigError("sequences", e.what());
    }

    if (j.contains("ansatz")) {
        const auto& a = j.at("ansatz");
        check_keys(a, "ansatz", {"kind", "layers", "topology"});
        const auto kind = get_string(a, "ansatz", "kind", "hea");
        if (kind == "hea") c.ansatz.kind = AnsatzKind::Hea;
        else if (kind == "qaoa") c.ansatz.kind = AnsatzKind::Qaoa;
        else throw ConfigError("ansatz.kind", "must be 'hea' or 'qaoa'");
        c.ansatz.layers = get_uint(a, "ansatz", "layers", c.ansatz.layers);
        const auto topo = get_string(a, "ansatz", "topology", "linear");
        if (topo == "linear") c.ansatz.topology = Topology::Linear;
        else if (topo == "ring") c.ansatz.topology = Topology::Ring;
        else throw ConfigError("ansatz.topology", "must be 'linear' or 'ring'");
    }

    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        check_keys(o, "optimizer", {"method", "update", "shots", "iterations", "adam", "spsa", "fd_step"});
        c.optimizer.method = parse_method(get_string(o, "optimizer", "method", "adjoint"));
        const auto upd = get_string(o, "optimizer", "update", "adam");
        if (upd == "adam") c.optimizer.update = UpdateRule::Adam;
        else if (upd == "spsa") c.optimizer.update = UpdateRule::Spsa;
        else throw ConfigError("optimizer.update", "must be 'adam' or 'spsa'");
        c.optimizer.shots = get_uint(o, "optimizer", "shots", c.optimizer.shots);
        c.optimizer.max_iters = get_uint(o, "optimizer", "iterations", c.optimizer.max_iters);
        c.optimizer.fd_step = get_number(o, "optimizer", "fd_step", c.optimizer.fd_step);
        if (o.contains("adam")) {
            const auto& a = o.at("adam");
            check_keys(a, "optimizer.adam", {"step", "beta1", "beta2", "epsilon"});
            c.optimizer.adam.step = get_number(a, "optimizer.adam", "step", c.optimizer.adam.step);
            c.optimizer.adam.beta1 = get_number(a, "optimizer.adam", "beta1", c.optimizer.adam.beta1);
            c.optimizer.adam.beta2 = get_number(a, "optimizer.adam", "beta2", c.optimizer.adam.beta2);
            c.optimizer.adam.epsilon = get_number(a, "optimizer.adam", "epsilon", c.optimizer.adam.epsilon);
        }
        if (o.contains("spsa")) {
            const auto& s = o.at("spsa");
            check_keys(s, "optimizer.spsa", {"a", "c", "A", "alpha", "gamma"});
            c.optimizer.spsa.a = get_number(s, "optimizer.spsa", "a", c.optimizer.spsa.a);
            c.optimizer.spsa.c = get_number(s, "optimizer.spsa", "c", c.optimizer.spsa.c);
            c.optimizer.spsa.stability = get_number(s, "optimizer.spsa", "A", c.optimizer.spsa.stability);
            c.optimizer.spsa.alpha = get_number(s, "optimizer.spsa", "alpha", c.optimizer.spsa.alpha);
            c.optimizer.spsa.gamma = get_number(s, "optimizer.spsa", "gamma", c.optimizer.spsa.gamma);
        }
    }
    c.optimizer.validate();

    if (j.contains("cvar")) {
        const auto& v = j.at("cvar");
        check_keys(v, "cvar", {"r0", "warmup", "r_final"});
        c.cvar.r0 = get_number(v, "cvar", "r0", c.cvar.r0);
        c.cvar.warmup_iters = get_uint(v, "cvar", "warmup", c.cvar.warmup_iters);
        c.cvar.r_final = get_number(v, "cvar", "r_final", c.cvar.r_final);
    }
    c.cvar.validate();

    if (j.contains("noise")) c.noise = parse_noise(j.at("noise"), "noise", c.noise);
    if (c.noise.gate_noise() && c.optimizer.method != GradientMethod::Spsa) {
        throw ConfigError("optimizer.method", "gate noise requires the spsa gradient method");
    }

    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        c.seeds.clear();
        if (s.is_array()) {
            for (const auto& e : s) {
                if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
                    throw ConfigError("seeds", "entries must be non-negative integers");
                }
                c.seeds.push_back(e.get<std::uint64_t>());
            }
        } else if (s.is_object()) {
            check_keys(s, "seeds", {"count", "start"});
            const auto count = get_uint(s, "seeds", "count", 1);
            const auto start = get_uint(s, "seeds", "start", 0);
            for (std::uint64_t k = 0; k < count; ++k) c.seeds.push_back(start + k);
        } else {
            throw ConfigError("seeds", "must be an array of integers or {\"count\": n, \"start\": s}");
        }
        if (c.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    }

    if (j.contains("study")) {
        const auto& s = j.at("study");
        check_keys(s, "study", {"kind", "layers", "r0", "warmup", "qaoa_rounds", "hea_layers", "noise"});
        if (s.contains("kind")) c.study.kind = parse_study_kind(get_string(s, "study", "kind", ""));
        if (s.contains("layers")) {
            const auto& l = s.at("layers");
            if (!l.is_array() || l.empty()) throw ConfigError("study.layers", "must be a non-empty integer array");
            c.study.layers.clear();
            for (const auto& e : l) {
                if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
                    throw ConfigError("study.layers", "entries must be non-negative integers");
                }
                c.study.layers.push_back(e.get<std::size_t>());
            }
        }
        c.study.warm_r0 = get_number(s, "study", "r0", c.study.warm_r0);
        if (!(c.study.warm_r0 > 0.0 && c.study.warm_r0 <= 1.0)) throw ConfigError("study.r0", "must lie in (0, 1]");
        c.study.warmup = get_uint(s, "study", "warmup", c.study.warmup);
        c.study.qaoa_rounds = get_uint(s, "study", "qaoa_rounds", c.study.qaoa_rounds);
        c.study.hea_layers = get_uint(s, "study", "hea_layers", c.study.hea_layers);
        if (s.contains("noise")) c.study.noise = parse_noise(s.at("noise"), "study.noise", c.study.noise);
    }

    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        check_keys(o, "outputs", {"directory", "formats", "all_shot_tables", "timing", "top"});
        c.outputs.directory = get_string(o, "outputs", "directory", c.outputs.directory.string());
        if (o.contains("formats")) {
            const auto& f = o.at("formats");
            if (!f.is_array() || f.empty()) throw ConfigError("outputs.formats", "must be a non-empty array");
            c.outputs.json = c.outputs.csv = false;
            for (const auto& e : f) {
                const auto v = e.is_string() ? e.get<std::string>() : std::string();
                if (v == "json") c.outputs.json = true;
                else if (v == "csv") c.outputs.csv = true;
                else throw ConfigError("outputs.formats", "entries must be 'json' or 'csv'");
            }
        }
        c.outputs.all_shot_tables = get_bool(o, "outputs", "all_shot_tables", false);
        c.outputs.timing = get_bool(o, "outputs", "timing", false);
        c.outputs.top = get_uint(o, "outputs", "top", c.outputs.top);
    }

    // register size and the clamp precondition, checked before any compute
    const std::size_t reg = c.clamp_reference ? set.qubits() - set.columns() : set.qubits();
    if (c.clamp_reference) {
        if (!set.reference()) throw ConfigError("clamp_reference", "needs a reference sequence");
        if (set.length(*set.reference()) != set.columns()) {
            throw ConfigError("clamp_reference", "reference length must equal the column count");
        }
    }
    if (reg > kDefaultStateCap) {
        throw ConfigError("sequences", std::to_string(reg) + " qubits exceeds the simulator cap of " +
                                           std::to_string(kDefaultStateCap));
    }
    if (c.ansatz.kind == AnsatzKind::Qaoa && c.optimizer.method == GradientMethod::ParameterShift) {
        throw ConfigError("optimizer.method", "parameter-shift does not apply to the qaoa ansatz");
    }
    c.ansatz.qubits = reg;
    return c;
}

[[nodiscard]] inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(j, path.parent_path());
}

/// Fully resolved config (defaults filled in, sequences inlined); parsing it
/// back yields the same scenario.
[[nodiscard]] inline Json to_json(const ScenarioConfig& c) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = c.name;
    j["sequences"] = c.sequences;
    if (c.columns) j["columns"] = *c.columns;
    if (c.reference) j["reference"] = *c.reference;
    j["clamp_reference"] = c.clamp_reference;
    j["penalty"] = c.penalty;
    j["ansatz"] = Json{{"kind", to_string(c.ansatz.kind)},
                       {"layers", c.ansatz.layers},
                       {"topology", to_string(c.ansatz.topology)}};
    const auto& o = c.optimizer;
    j["optimizer"] = Json{{"method", to_string(o.method)},
                          {"update", to_string(o.update)},
                          {"shots", o.shots},
                          {"iterations", o.max_iters},
                          {"adam", {{"step", o.adam.step}, {"beta1", o.adam.beta1}, {"beta2", o.adam.beta2},
                                    {"epsilon", o.adam.epsilon}}},
                          {"spsa", {{"a", o.spsa.a}, {"c", o.spsa.c}, {"A", o.spsa.stability},
                                    {"alpha", o.spsa.alpha}, {"gamma", o.spsa.gamma}}},
                          {"fd_step", o.fd_step}};
    j["cvar"] = Json{{"r0", c.cvar.r0}, {"warmup", c.cvar.warmup_iters}, {"r_final", c.cvar.r_final}};
    j["noise"] = config_detail::noise_json(c.noise);
    j["seeds"] = c.seeds;
    Json study;
    if (c.study.kind) study["kind"] = to_string(*c.study.kind);
    study["layers"] = c.study.layers;
    study["r0"] = c.study.warm_r0;
    study["warmup"] = c.study.warmup;
    study["qaoa_rounds"] = c.study.qaoa_rounds;
    study["hea_layers"] = c.study.hea_layers;
    study["noise"] = config_detail::noise_json(c.study.noise);
    j["study"] = study;
    Json formats = Json::array();
    if (c.outputs.json) formats.push_back("json");
    if (c.outputs.csv) formats.push_back("csv");
    j["outputs"] = Json{{"directory", c.outputs.directory.string()},
                        {"formats", formats},
                        {"all_shot_tables", c.outputs.all_shot_tables},
                        {"timing", c.outputs.timing},
                        {"top", c.outputs.top}};
    return j;
}

}  // namespace hqmsa
