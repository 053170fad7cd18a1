#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "ots/error.hpp"
#include "ots/graph.hpp"
#include "ots/milp_model.hpp"
#include "ots/simplex.hpp"

namespace ots {

enum class SolveStatus { optimal, infeasible, unbounded, cap_hit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::optimal: return "Optimal";
    case SolveStatus::infeasible: return "Infeasible";
    case SolveStatus::unbounded: return "Unbounded";
    case SolveStatus::cap_hit: return "CapHit";
    }
    return "?";
}

enum class BranchRule { most_fractional, lowest_index };

struct SolverOptions {
    double feas_tol = 1e-6;
    double int_tol = 1e-6;
    double rel_gap = 1e-6;
    long node_cap = 1'000'000;
    double time_cap = inf; // seconds
    BranchRule branch_rule = BranchRule::most_fractional;

    void validate() const {
        if (!(feas_tol > 0 && int_tol > 0 && rel_gap > 0 && node_cap > 0 && time_cap > 0))
            throw ModelError("solver options: tolerances and caps must be positive");
    }
};

struct SolveStats {
    long nodes = 0;
    long lp_iterations = 0;
    double wall_time = 0; // seconds
    double root_bound = -inf;
    double best_bound = -inf;
};

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    bool has_incumbent = false;
    double objective = inf;
    std::vector<double> x;               // declared variable order
    std::map<std::string, double> values; // by variable name
    Topology z;                           // binaries in declared order, rounded
    SolveStats stats;

    double value(const std::string& name) const {
        const auto it = values.find(name);
        if (it == values.end()) throw ModelError("solution has no variable " + name);
        return it->second;
    }
};

namespace detail {

inline lp::Problem to_lp(const MilpModel& model) {
    lp::Problem p;
    const int n = model.variable_count();
    p.cost.assign(n, 0.0);
    for (const auto& t : model.objective().terms) p.cost[t.var] += t.coef;
    for (const auto& v : model.variables()) {
        p.lower.push_back(v.lower);
        p.upper.push_back(v.upper);
    }
    for (const auto& row : model.rows()) {
        // merge duplicate columns so the tableau sees one coefficient per column
        std::map<int, double> merged;
        for (const auto& t : row.terms) merged[t.var] += t.coef;
        std::vector<lp::Problem::Entry> entries;
        for (const auto& [col, val] : merged)
            if (val != 0.0) entries.push_back({col, val});
        p.rows.push_back(std::move(entries));
        p.row_lower.push_back(row.sense == Sense::le ? -inf : row.rhs);
        p.row_upper.push_back(row.sense == Sense::ge ? inf : row.rhs);
    }
    return p;
}

struct Node {
    long id = 0;
    double bound = -inf;
    std::vector<std::pair<int, double>> fixes; // binary var -> fixed value
    std::shared_ptr<const lp::Basis> basis;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

} // namespace detail

inline void fill_solution_maps(const MilpModel& model, Solution& sol) {
    sol.values.clear();
    sol.z.clear();
    for (int j = 0; j < model.variable_count(); ++j) {
        const auto& v = model.variables()[j];
        sol.values[v.name] = sol.x[j];
        if (v.kind == VarKind::binary) sol.z.push_back(sol.x[j] > 0.5 ? 1 : 0);
    }
}

/// Best-bound branch-and-bound over the binary variables with LP relaxations solved by
/// the bundled simplex. Children reoptimise from the parent's final basis. Ties in the
/// node queue go to the older node; the down branch is created first.
inline Solution solve(const MilpModel& model, const SolverOptions& opts = {}) {
    opts.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    Solution sol;
    lp::Simplex lp(detail::to_lp(model));
    const int n = model.variable_count();
    std::vector<int> binaries;
    for (int j = 0; j < n; ++j)
        if (model.variables()[j].kind == VarKind::binary) binaries.push_back(j);
    const double obj_const = model.objective().constant;

    auto apply_fixes = [&](const std::vector<std::pair<int, double>>& fixes) {
        for (int j : binaries) lp.set_bounds(j, model.variables()[j].lower, model.variables()[j].upper);
        for (const auto& [j, v] : fixes) lp.set_bounds(j, v, v);
    };

    std::priority_queue<detail::Node, std::vector<detail::Node>, detail::NodeOrder> open;
    long next_id = 0;
    open.push({next_id++, -inf, {}, nullptr});
    double incumbent = inf;
    std::vector<double> best_x;
    bool capped = false;
    bool root_done = false;
    auto gap_tol = [&](double inc) { return opts.rel_gap * std::max(1.0, std::abs(inc)); };

    while (!open.empty()) {
        if (sol.stats.nodes >= opts.node_cap || elapsed() > opts.time_cap) {
            capped = true;
            break;
        }
        detail::Node node = open.top();
        if (std::isfinite(incumbent) && node.bound >= incumbent - gap_tol(incumbent)) {
            // best-bound order: every remaining node is at least as bad
            while (!open.empty()) open.pop();
            break;
        }
        open.pop();
        ++sol.stats.nodes;
        if (node.basis) lp.load_basis(*node.basis);
        apply_fixes(node.fixes);
        const auto st = lp.solve();
        if (st == lp::Status::infeasible) {
            if (!root_done) break;
            continue;
        }
        if (st == lp::Status::unbounded) {
            if (!root_done) {
                sol.status = SolveStatus::unbounded;
                sol.stats.lp_iterations = lp.iterations();
                sol.stats.wall_time = elapsed();
                return sol;
            }
            continue;
        }
        if (st == lp::Status::iteration_limit) {
            capped = true;
            break;
        }
        const double obj = lp.objective() + obj_const;
        if (!root_done) {
            sol.stats.root_bound = obj;
            root_done = true;
        }
        if (std::isfinite(incumbent) && obj >= incumbent - gap_tol(incumbent)) continue;
        const auto x = lp.values();

        int branch_var = -1;
        double best_score = -1;
        for (int j : binaries) {
            const double frac = std::abs(x[j] - std::round(x[j]));
            if (frac <= opts.int_tol) continue;
            if (opts.branch_rule == BranchRule::lowest_index) {
                branch_var = j;
                break;
            }
            const double score = 0.5 - std::abs(x[j] - std::floor(x[j]) - 0.5);
            if (score > best_score + 1e-12) {
                best_score = score;
                branch_var = j;
            }
        }
        if (branch_var < 0) {
            incumbent = obj;
            best_x = x;
            continue;
        }
        auto basis = std::make_shared<const lp::Basis>(lp.snapshot());
        auto down = node.fixes;
        down.emplace_back(branch_var, 0.0);
        auto up = node.fixes;
        up.emplace_back(branch_var, 1.0);
        open.push({next_id++, obj, std::move(down), basis});
        open.push({next_id++, obj, std::move(up), basis});
    }

    sol.stats.best_bound = incumbent;
    if (!open.empty()) sol.stats.best_bound = std::min(incumbent, open.top().bound);

    if (!best_x.empty()) {
        // Polish: fix the binaries at their rounded values and re-solve the LP so the
        // continuous part is consistent with exact 0/1 statuses.
        std::vector<std::pair<int, double>> fixes;
        for (int j : binaries) fixes.emplace_back(j, std::round(best_x[j]));
        apply_fixes(fixes);
        if (lp.solve() == lp::Status::optimal) {
            best_x = lp.values();
            incumbent = lp.objective() + obj_const;
        }
        for (int j : binaries) best_x[j] = std::round(best_x[j]);
        sol.has_incumbent = true;
        sol.objective = incumbent;
        sol.x = best_x;
        fill_solution_maps(model, sol);
    }
    if (capped)
        sol.status = SolveStatus::cap_hit;
    else
        sol.status = sol.has_incumbent ? SolveStatus::optimal : SolveStatus::infeasible;
    sol.stats.lp_iterations = lp.iterations();
    sol.stats.wall_time = elapsed();
    return sol;
}

struct Violation {
    std::string tag;      // row tag, or "bound:<var>" / "integrality:<var>"
    double amount = 0;
};

struct CheckReport {
    std::vector<Violation> violations;
    double objective = 0;
    bool ok() const { return violations.empty(); }
};

/// Re-evaluates every row, bound and integrality requirement against `x`.
inline CheckReport check_solution(const MilpModel& model, const std::vector<double>& x, double feas_tol = 1e-6,
                                  double int_tol = 1e-6) {
    if (static_cast<int>(x.size()) != model.variable_count())
        throw ModelError("check_solution: value vector does not cover every variable");
    CheckReport rep;
    for (const auto& row : model.rows()) {
        const double v = row_violation(row, row_activity(row, x));
        if (v > feas_tol) rep.violations.push_back({row.tag, v});
    }
    for (int j = 0; j < model.variable_count(); ++j) {
        const auto& var = model.variables()[j];
        const double v = std::max(var.lower - x[j], x[j] - var.upper);
        if (v > feas_tol) rep.violations.push_back({"bound:" + var.name, v});
        if (var.kind == VarKind::binary && std::abs(x[j] - std::round(x[j])) > int_tol)
            rep.violations.push_back({"integrality:" + var.name, std::abs(x[j] - std::round(x[j]))});
    }
    rep.objective = model.evaluate_objective(x);
    return rep;
}

/// Name-keyed overload for values coming from outside (e.g. an external solver).
inline CheckReport check_solution(const MilpModel& model, const std::map<std::string, double>& values,
                                  double feas_tol = 1e-6, double int_tol = 1e-6) {
    std::vector<double> x(static_cast<std::size_t>(model.variable_count()));
    for (int j = 0; j < model.variable_count(); ++j) {
        const auto& name = model.variables()[j].name;
        const auto it = values.find(name);
        if (it == values.end()) throw ModelError("check_solution: missing variable " + name);
        x[j] = it->second;
    }
    return check_solution(model, x, feas_tol, int_tol);
}

namespace detail {

inline std::string fmt17(double v) {
    if (v == inf) return "+inf";
    if (v == -inf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_terms(std::ostream& out, const MilpModel& model, const std::vector<Term>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        const double c = t.coef;
        if (first) out << (c < 0 ? "- " : "") << fmt17(std::abs(c)) << ' ' << model.variables()[t.var].name;
        else out << (c < 0 ? " - " : " + ") << fmt17(std::abs(c)) << ' ' << model.variables()[t.var].name;
        first = false;
    }
    if (first && model.variable_count() > 0) out << "0 " << model.variables()[0].name;
}

} // namespace detail

/// LP text format: Minimize / Subject To / Bounds / Binaries / End.
inline std::string to_lp_text(const MilpModel& model) {
    std::ostringstream out;
    out << "Minimize\n obj: ";
    detail::write_terms(out, model, model.objective().terms);
    if (model.objective().constant != 0.0) {
        const double c = model.objective().constant;
        out << (c < 0 ? " - " : " + ") << detail::fmt17(std::abs(c));
    }
    out << "\nSubject To\n";
    for (const auto& row : model.rows()) {
        out << ' ' << row.tag << ": ";
        detail::write_terms(out, model, row.terms);
        out << (row.sense == Sense::le ? " <= " : row.sense == Sense::ge ? " >= " : " = ") << detail::fmt17(row.rhs)
            << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : model.variables()) {
        if (v.lower == -inf && v.upper == inf) out << ' ' << v.name << " free\n";
        else if (v.lower == v.upper) out << ' ' << v.name << " = " << detail::fmt17(v.lower) << '\n';
        else out << ' ' << detail::fmt17(v.lower) << " <= " << v.name << " <= " << detail::fmt17(v.upper) << '\n';
    }
    out << "Binaries\n";
    for (const auto& v : model.variables())
        if (v.kind == VarKind::binary) out << ' ' << v.name << '\n';
    out << "End\n";
    return out.str();
}

inline void export_lp(const MilpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("export_lp: cannot open " + path.string());
    out << to_lp_text(model);
    if (!out) throw Error("export_lp: write failed for " + path.string());
}

} // namespace ots
