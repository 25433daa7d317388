#pragma once

// Result files for scenarios and studies. Everything except timing.csv is a
// pure function of the resolved config and the seeds, so reruns produce
// byte-identical files.
//
// Layout under the output directory:
//   config.json                      resolved scenario
//   summary.json | summary.csv       per-arm aggregates, comparisons
//   seeds.csv                        one row per (arm, seed)
//   <arm>/seed_<s>_trace.{jsonl,csv}
//   <arm>/seed_<s>_histogram.{json,csv}   full final shot table
//   timing.csv                       opt-in wall-clock per iteration

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "hqmsa/config.hpp"
#include "hqmsa/error.hpp"
#include "hqmsa/problem.hpp"
#include "hqmsa/study.hpp"

namespace hqmsa {

/// Shortest round-trip decimal form.
[[nodiscard]] inline std::string fmt(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace report_detail {

inline std::ofstream open(const std::filesystem::path& p) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
}

inline Json histogram_json(const std::vector<HistogramRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        arr.push_back(Json{{"bitstring", r.bitstring},
                           {"index", r.index},
                           {"count", r.count},
                           {"energy", r.energy},
                           {"feasible", r.feasible},
                           {"class", r.tag ? to_string(*r.tag) : "unknown"}});
    }
    return arr;
}

inline void write_histogram_csv_full(std::ostream& out, const std::vector<HistogramRow>& rows) {
    out << "bitstring,index,count,energy,feasible,class\n";
    for (const auto& r : rows) {
        out << r.bitstring << ',' << r.index << ',' << r.count << ',' << fmt(r.energy) << ','
            << (r.feasible ? 1 : 0) << ',' << (r.tag ? to_string(*r.tag) : std::string("unknown")) << '\n';
    }
}

inline Json shots_json(const ShotTable& t, const Problem& problem) {
    Json j = Json::object();
    for (const auto& [idx, c] : t.counts()) j[problem.bitstring(idx)] = c;
    return j;
}

inline Json arm_json(const ArmResult& a) {
    Json j;
    j["label"] = a.label;
    j["ansatz"] = Json{{"kind", to_string(a.ansatz.kind)},
                       {"layers", a.ansatz.layers},
                       {"topology", to_string(a.ansatz.topology)},
                       {"qubits", a.ansatz.qubits}};
    j["method"] = to_string(a.optimizer.method);
    j["cvar"] = Json{{"r0", a.cvar.r0}, {"warmup", a.cvar.warmup_iters}, {"r_final", a.cvar.r_final}};
    j["noise"] = config_detail::noise_json(a.noise);
    j["seeds"] = a.seeds.size();
    j["mean_final_energy"] = a.mean_final;
    j["median_final_energy"] = a.median_final;
    j["std_final_energy"] = a.std_final;
    j["hit_rate"] = a.hit_rate;
    j["best_optimal_rate"] = a.best_optimal_rate;
    j["modal_optimal_rate"] = a.modal_optimal_rate;
    j["final_energies"] = a.final_energies();
    return j;
}

}  // namespace report_detail

/// Directory-safe arm label.
[[nodiscard]] inline std::string arm_directory(const std::string& label) {
    std::string s;
    for (char c : label) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return s;
}

[[nodiscard]] inline Json summary_json(const ScenarioConfig& config, const StudyResult& r) {
    Json j;
    j["name"] = config.name;
    j["kind"] = r.kind;
    j["qubits"] = config.ansatz.qubits;
    j["global_minimum"] = r.global_minimum ? Json(*r.global_minimum) : Json(nullptr);
    j["hit_threshold"] = kHitThreshold;
    Json arms = Json::array();
    for (const auto& a : r.arms) arms.push_back(report_detail::arm_json(a));
    j["arms"] = arms;
    Json cmp = Json::array();
    for (const auto& c : r.comparisons) {
        cmp.push_back(Json{{"hypothesis", "mean(" + c.lhs + ") < mean(" + c.rhs + ")"},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"mean_lhs", c.mean_lhs},
                           {"mean_rhs", c.mean_rhs},
                           {"t", c.test.statistic},
                           {"dof", c.test.dof},
                           {"p_value", c.test.p_value}});
    }
    j["comparisons"] = cmp;
    return j;
}

inline void write_summary_csv(std::ostream& out, const StudyResult& r) {
    out << "arm,seeds,mean_final_energy,median_final_energy,std_final_energy,hit_rate,best_optimal_rate,"
           "modal_optimal_rate\n";
    for (const auto& a : r.arms) {
        out << a.label << ',' << a.seeds.size() << ',' << fmt(a.mean_final) << ',' << fmt(a.median_final) << ','
            << fmt(a.std_final) << ',' << fmt(a.hit_rate) << ',' << fmt(a.best_optimal_rate) << ','
            << fmt(a.modal_optimal_rate) << '\n';
    }
}

inline void write_seeds_csv(std::ostream& out, const StudyResult& r, const Problem& problem) {
    out << "arm,seed,final_expectation,final_loss,ground_probability,hit,best_bitstring,best_energy,"
           "modal_bitstring,modal_energy\n";
    for (const auto& a : r.arms) {
        for (const auto& s : a.seeds) {
            out << a.label << ',' << s.seed << ',' << fmt(s.final_expectation) << ',' << fmt(s.final_loss) << ','
                << fmt(s.final_ground_probability) << ',' << (s.hit ? 1 : 0) << ','
                << problem.bitstring(s.best_index) << ',' << fmt(s.best_energy) << ','
                << problem.bitstring(s.modal_index) << ',' << fmt(s.modal_energy) << '\n';
        }
    }
}

inline void write_trace_csv(std::ostream& out, const TrainingTrace& t) {
    out << "iteration,r,loss,expectation,ground_probability,best_energy\n";
    for (const auto& rec : t.records) {
        out << rec.iteration << ',' << fmt(rec.r) << ',' << fmt(rec.loss) << ',' << fmt(rec.expectation) << ','
            << fmt(rec.ground_probability) << ',' << fmt(rec.best_energy) << '\n';
    }
}

inline void write_trace_jsonl(std::ostream& out, const TrainingTrace& t, const Problem& problem) {
    for (const auto& rec : t.records) {
        Json j{{"iteration", rec.iteration},
               {"r", rec.r},
               {"loss", rec.loss},
               {"expectation", rec.expectation},
               {"ground_probability", rec.ground_probability},
               {"best_energy", rec.best_energy}};
        if (!rec.theta.empty()) j["theta"] = rec.theta;
        if (rec.shots) j["shots"] = report_detail::shots_json(*rec.shots, problem);
        out << j.dump() << '\n';
    }
}

/// Writes every result file; returns the paths written, in order.
inline std::vector<std::filesystem::path> write_results(const std::filesystem::path& dir,
                                                        const ScenarioConfig& config, const StudyResult& r,
                                                        const Problem& problem) {
    using report_detail::open;
    std::vector<std::filesystem::path> written;
    auto file = [&](const std::filesystem::path& rel) {
        written.push_back(dir / rel);
        return open(dir / rel);
    };
    file("config.json") << to_json(config).dump(2) << '\n';
    if (config.outputs.json) file("summary.json") << summary_json(config, r).dump(2) << '\n';
    if (config.outputs.csv) {
        auto s = file("summary.csv");
        write_summary_csv(s, r);
    }
    {
        auto s = file("seeds.csv");
        write_seeds_csv(s, r, problem);
    }
    for (const auto& a : r.arms) {
        const std::filesystem::path sub = arm_directory(a.label);
        for (const auto& s : a.seeds) {
            const std::string stem = "seed_" + std::to_string(s.seed);
            const auto rows = histogram(s.trace.final_shots, problem, r.global_minimum);
            if (config.outputs.json) {
                auto t = file(sub / (stem + "_trace.jsonl"));
                write_trace_jsonl(t, s.trace, problem);
                file(sub / (stem + "_histogram.json")) << report_detail::histogram_json(rows).dump(2) << '\n';
            }
            if (config.outputs.csv) {
                auto t = file(sub / (stem + "_trace.csv"));
                write_trace_csv(t, s.trace);
                auto h = file(sub / (stem + "_histogram.csv"));
                report_detail::write_histogram_csv_full(h, rows);
            }
        }
    }
    if (config.outputs.timing) {
        auto t = file("timing.csv");
        t << "arm,seed,iteration,seconds\n";
        for (const auto& a : r.arms) {
            for (const auto& s : a.seeds) {
                for (const auto& rec : s.trace.records) {
                    t << a.label << ',' << s.seed << ',' << rec.iteration << ',' << fmt(rec.seconds) << '\n';
                }
            }
        }
    }
    return written;
}

/// Console summary: aggregates per arm and the top rows of each arm's first
/// seed histogram.
inline void print_summary(std::ostream& out, const ScenarioConfig& config, const StudyResult& r,
                          const Problem& problem) {
    out << config.name << " [" << r.kind << "] " << config.ansatz.qubits << " qubits";
    if (r.global_minimum) out << ", oracle minimum " << fmt(*r.global_minimum);
    out << '\n';
    for (const auto& a : r.arms) {
        out << "  " << a.label << ": seeds=" << a.seeds.size() << " mean=" << fmt(a.mean_final)
            << " median=" << fmt(a.median_final) << " std=" << fmt(a.std_final) << " hit_rate=" << fmt(a.hit_rate)
            << " best_optimal=" << fmt(a.best_optimal_rate) << " modal_optimal=" << fmt(a.modal_optimal_rate)
            << '\n';
        if (a.seeds.empty() || config.outputs.top == 0) continue;
        const auto& s = a.seeds.front();
        const auto rows = histogram(s.trace.final_shots, problem, r.global_minimum);
        out << "    seed " << s.seed << " top " << std::min(config.outputs.top, rows.size()) << " of "
            << rows.size() << " states:\n";
        for (std::size_t k = 0; k < rows.size() && k < config.outputs.top; ++k) {
            out << "      " << rows[k].bitstring << ' ' << std::setw(6) << rows[k].count << "  E=" << std::setw(6)
                << fmt(rows[k].energy) << "  " << (rows[k].tag ? to_string(*rows[k].tag) : "unknown") << '\n';
        }
    }
    for (const auto& c : r.comparisons) {
        out << "  H1 mean(" << c.lhs << ") < mean(" << c.rhs << "): t=" << fmt(c.test.statistic)
            << " p=" << fmt(c.test.p_value) << '\n';
    }
}

inline void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
    out << "instance,n,mean_seconds,std_seconds,samples\n";
    for (const auto& r : rows) {
        out << r.instance << ',' << r.qubits << ',' << fmt(r.mean_seconds) << ',' << fmt(r.std_seconds) << ','
            << r.samples.size() << '\n';
    }
}

inline void write_timing_raw_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
    out << "instance,n,sample,seconds\n";
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.samples.size(); ++k) {
            out << r.instance << ',' << r.qubits << ',' << k << ',' << fmt(r.samples[k]) << '\n';
        }
    }
}

}  // namespace hqmsa
