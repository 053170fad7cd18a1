#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ots/constraints.hpp"
#include "ots/error.hpp"
#include "ots/grid_model.hpp"
#include "ots/random.hpp"
#include "ots/solver.hpp"
#include "ots/variants.hpp"

namespace ots {

struct ExperimentSpec {
    std::string case_name;
    Network network;
    std::vector<ModelVariant> variants;
    std::vector<double> alphas;
    int samples = 1;
    std::uint64_t seed = 0;
    SolverOptions solver;
    AssembleOptions assemble;
    std::optional<double> big_m;
    std::optional<std::filesystem::path> export_lp_dir;
    int threads = 1;

    void validate() const {
        if (samples < 1) throw ModelError("experiment: samples must be at least 1");
        if (variants.empty()) throw ModelError("experiment: no variants given");
        if (alphas.empty()) throw ModelError("experiment: no alphas given");
        for (double a : alphas)
            if (!(a > 0 && a <= 1)) throw ModelError("experiment: alpha must lie in (0, 1]");
        if (big_m && !(*big_m > 0)) throw ModelError("experiment: big-M must be positive");
        if (threads < 1) throw ModelError("experiment: threads must be at least 1");
        solver.validate();
    }
};

struct RunRecord {
    std::string case_name;
    std::string variant;
    double alpha = 0;
    int sample = 0;
    std::uint64_t config_seed = 0;
    std::string status;                        // solver status, or "Error"
    std::optional<double> objective;
    std::optional<bool> connected;             // base topology, union-find
    std::optional<bool> contingency_connected; // every post-contingency topology (N variants)
    long nodes = 0;
    long lp_iterations = 0;
    int rows = 0;
    int variables = 0;
    int connectedness_rows = 0;
    std::string switchable;                    // branch ids joined by ';'
    std::string message;
    double wall_time = 0;                      // seconds, solve() only
};

inline const std::vector<std::string>& csv_header() {
    static const std::vector<std::string> h = {
        "case",  "variant",          "alpha", "sample",    "seed",    "prng",   "status",
        "objective", "connected", "contingency_connected", "nodes", "lp_iterations", "rows", "variables",
        "connectedness_rows", "switchable", "message", "wall_time_s"};
    return h;
}

namespace detail {

inline std::string fmt_real(double v, int digits = 12) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string csv_clean(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

inline std::string opt_bool(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : ""; }

inline RunRecord run_one(const ExperimentSpec& spec, ModelVariant variant, double alpha, int sample,
                         const ContingencySet& contingencies) {
    RunRecord rec;
    rec.case_name = spec.case_name;
    rec.variant = to_string(variant);
    rec.alpha = alpha;
    rec.sample = sample;
    rec.config_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(sample));
    try {
        const Network& net = spec.network;
        const SwitchConfig cfg = sample_switchable(net, alpha, rec.config_seed);
        for (std::size_t i = 0; i < cfg.switchable_ids.size(); ++i)
            rec.switchable += (i ? ";" : "") + std::to_string(cfg.switchable_ids[i]);
        BigMPolicy policy = default_policy(net);
        if (spec.big_m) policy.M = *spec.big_m;
        const auto assembled = assemble(variant, net, cfg, contingencies, policy, spec.assemble);
        const MilpModel& model = assembled.model;
        rec.rows = model.row_count();
        rec.variables = model.variable_count();
        rec.connectedness_rows = assembled.connectedness_rows;
        if (spec.export_lp_dir) {
            const auto file = *spec.export_lp_dir / (csv_clean(spec.case_name) + "_" + rec.variant + "_a" +
                                                     fmt_real(alpha, 6) + "_s" + std::to_string(sample) + ".lp");
            export_lp(model, file);
        }
        const Solution sol = solve(model, spec.solver);
        rec.status = to_string(sol.status);
        rec.nodes = sol.stats.nodes;
        rec.lp_iterations = sol.stats.lp_iterations;
        rec.wall_time = sol.stats.wall_time;
        if (sol.has_incumbent) {
            rec.objective = sol.objective;
            const Topology z = extract_topology(model, sol.x, net);
            const Multigraph g = to_multigraph(net);
            rec.connected = is_connected(g, z);
            if (is_security_variant(variant)) {
                bool all = true;
                Topology zk = z;
                for (int kappa : contingencies.branch_ids) {
                    zk[kappa - 1] = 0;
                    all = all && is_connected(g, zk);
                    zk[kappa - 1] = z[kappa - 1];
                }
                rec.contingency_connected = all;
            }
        }
    } catch (const std::exception& e) {
        rec.status = "Error";
        rec.message = csv_clean(e.what());
    }
    return rec;
}

} // namespace detail

/// Runs every (alpha, sample, variant) combination. The switchable set depends only on
/// (seed, sample, alpha), so variants are compared on identical configurations. Failures
/// become rows; records come back in loop order regardless of thread count.
inline std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    validate(spec.network);
    const ContingencySet contingencies = default_contingencies(spec.network);
    struct Job {
        ModelVariant variant;
        double alpha;
        int sample;
    };
    std::vector<Job> jobs;
    for (double a : spec.alphas)
        for (int s = 0; s < spec.samples; ++s)
            for (auto v : spec.variants) jobs.push_back({v, a, s});
    std::vector<RunRecord> out(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();)
            out[i] = detail::run_one(spec, jobs[i].variant, jobs[i].alpha, jobs[i].sample, contingencies);
    };
    const int nthreads = std::min<int>(spec.threads, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

inline void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    const auto& h = csv_header();
    for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
    out << '\n';
    for (const auto& r : records) {
        out << detail::csv_clean(r.case_name) << ',' << r.variant << ',' << detail::fmt_real(r.alpha) << ','
            << r.sample << ',' << r.config_seed << ',' << prng_name << ',' << r.status << ','
            << (r.objective ? detail::fmt_real(*r.objective) : "") << ',' << detail::opt_bool(r.connected) << ','
            << detail::opt_bool(r.contingency_connected) << ',' << r.nodes << ',' << r.lp_iterations << ','
            << r.rows << ',' << r.variables << ',' << r.connectedness_rows << ',' << r.switchable << ','
            << r.message << ',' << detail::fmt_real(r.wall_time, 6) << '\n';
    }
}

struct SummaryRow {
    std::string variant;
    double alpha = 0;
    int runs = 0;
    int optimal = 0;
    int connected = 0;  // among Optimal rows (and all post-contingency topologies for N variants)
    int cap_hit = 0;
    int infeasible = 0;
    int other = 0;      // Unbounded or Error
    double mean_time = 0;   // over Optimal rows
    double median_time = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline int variant_rank(const std::string& v) {
    try {
        return static_cast<int>(parse_variant(v));
    } catch (const ModelError&) {
        return 99;
    }
}

} // namespace detail

/// Per (variant, alpha): connected optima and solve times of Optimal rows; other statuses
/// counted separately.
inline std::vector<SummaryRow> summarize(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"variant", "alpha", "status", "connected", "contingency_connected", "wall_time_s"})
        if (!col.count(need)) throw ParseError(std::string("summary: CSV lacks column ") + need);

    struct Acc {
        SummaryRow row;
        std::vector<double> times;
    };
    std::map<std::pair<int, std::pair<double, std::string>>, Acc> groups;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError("summary: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()));
        const std::string& variant = cells[col["variant"]];
        double alpha = 0, t = 0;
        try {
            alpha = std::stod(cells[col["alpha"]]);
            t = std::stod(cells[col["wall_time_s"]]);
        } catch (const std::exception&) {
            throw ParseError("summary: line " + std::to_string(lineno) + " has a non-numeric alpha or wall time");
        }
        auto& acc = groups[{detail::variant_rank(variant), {alpha, variant}}];
        acc.row.variant = variant;
        acc.row.alpha = alpha;
        ++acc.row.runs;
        const std::string& status = cells[col["status"]];
        if (status == "Optimal") {
            ++acc.row.optimal;
            acc.times.push_back(t);
            const bool base = cells[col["connected"]] == "true";
            const std::string& post = cells[col["contingency_connected"]];
            if (base && (post.empty() || post == "true")) ++acc.row.connected;
        } else if (status == "CapHit") {
            ++acc.row.cap_hit;
        } else if (status == "Infeasible") {
            ++acc.row.infeasible;
        } else {
            ++acc.row.other;
        }
    }
    std::vector<SummaryRow> out;
    for (auto& [key, acc] : groups) {
        auto& t = acc.times;
        if (!t.empty()) {
            double s = 0;
            for (double v : t) s += v;
            acc.row.mean_time = s / static_cast<double>(t.size());
            std::sort(t.begin(), t.end());
            const std::size_t h = t.size() / 2;
            acc.row.median_time = t.size() % 2 ? t[h] : 0.5 * (t[h - 1] + t[h]);
        }
        out.push_back(acc.row);
    }
    return out;
}

inline std::string format_summary(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-7s %6s %5s %8s %10s %7s %10s %6s %12s %12s\n", "variant", "alpha", "runs",
                  "optimal", "connected", "cap_hit", "infeasible", "other", "mean_time_s", "median_time_s");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-7s %6.3g %5d %8d %10d %7d %10d %6d %12.6f %12.6f\n", r.variant.c_str(),
                      r.alpha, r.runs, r.optimal, r.connected, r.cap_hit, r.infeasible, r.other, r.mean_time,
                      r.median_time);
        out << buf;
    }
    return out.str();
}

} // namespace ots
