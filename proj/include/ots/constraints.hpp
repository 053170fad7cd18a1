#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ots/balance.hpp"
#include "ots/error.hpp"
#include "ots/graph.hpp"
#include "ots/grid_model.hpp"
#include "ots/milp_model.hpp"

namespace ots {

struct BigMPolicy {
    double K = 0; // angle/flow decoupling when a branch is open
    double M = 0; // auxiliary potential/flow decoupling in the connectedness block

    void validate() const {
        if (!(K > 0) || !std::isfinite(K)) throw ModelError("big-M policy: K must be positive and finite");
        if (!(M > 0) || !std::isfinite(M)) throw ModelError("big-M policy: M must be positive and finite");
    }
};

inline double default_k(const Network& net) {
    double bmax = 0, lo = inf, hi = -inf;
    for (const auto& br : net.branches) bmax = std::max(bmax, br.b);
    for (const auto& bus : net.buses) {
        lo = std::min(lo, bus.theta_min);
        hi = std::max(hi, bus.theta_max);
    }
    if (net.buses.empty()) return 1;
    return bmax * (hi - lo) + 1;
}

/// Safe M for the canonical injection vector on n nodes. Flows of the auxiliary unit
/// network are bounded by |c|_1 and any potential span by (n-1)|c|_inf.
inline double default_m(int n) {
    if (n < 2) return 1;
    const double norm1 = 2.0 * (n - 1);
    const double norm_inf = n - 1;
    return std::max(norm1, (n - 1) * norm_inf) + 1;
}

inline BigMPolicy default_policy(const Network& net) { return {default_k(net), default_m(net.bus_count())}; }

inline std::vector<double> make_uniquely_balanced_c(int n, int pivot = 1) {
    if (n < 2) throw ModelError("make_uniquely_balanced_c: need at least 2 nodes");
    if (pivot < 1 || pivot > n) throw ModelError("make_uniquely_balanced_c: pivot out of range");
    std::vector<double> c(static_cast<std::size_t>(n), 1.0);
    c[static_cast<std::size_t>(pivot - 1)] = 1.0 - n;
    return c;
}

/// Status of a branch inside a block: either a binary variable of the model or a constant.
struct EdgeStatus {
    int var = -1;       // model variable index, or -1 for a constant
    double value = 1.0; // used when var < 0

    static EdgeStatus variable(int v) { return {v, 0.0}; }
    static EdgeStatus constant(double v) { return {-1, v}; }
};

namespace detail {

// Appends coef*status to the row, folding constants into the right-hand side.
inline void add_status(std::vector<Term>& terms, double& rhs, const EdgeStatus& s, double coef) {
    if (s.var >= 0) terms.push_back({s.var, coef});
    else rhs -= coef * s.value;
}

inline std::string id_tag(int id, const std::string& suffix) { return std::to_string(id) + suffix; }

} // namespace detail

inline int z_var(const MilpModel& model, int branch_id) { return model.index_of("z_" + std::to_string(branch_id)); }

inline std::vector<EdgeStatus> branch_statuses(const MilpModel& model, const Network& net) {
    std::vector<EdgeStatus> st;
    st.reserve(net.branches.size());
    for (const auto& br : net.branches) st.push_back(EdgeStatus::variable(z_var(model, br.id)));
    return st;
}

/// Statuses with branch `kappa` forced out of service.
inline std::vector<EdgeStatus> contingency_statuses(const MilpModel& model, const Network& net, int kappa) {
    auto st = branch_statuses(model, net);
    st.at(static_cast<std::size_t>(kappa - 1)) = EdgeStatus::constant(0.0);
    return st;
}

/// DC power-flow block: generation, angles and flows with bounds, capacity gating,
/// angle/flow coupling and nodal balance. Variable names take `suffix`.
inline void add_dc_block(MilpModel& model, const Network& net, const std::vector<EdgeStatus>& status, double K,
                         const std::string& suffix) {
    if (status.size() != net.branches.size()) throw ModelError("add_dc_block: one status per branch required");
    std::vector<int> pg, th, pb;
    for (const auto& bus : net.buses)
        pg.push_back(model.add_variable("pg_" + detail::id_tag(bus.id, suffix), VarKind::continuous, bus.p_g_min,
                                        bus.p_g_max));
    for (const auto& bus : net.buses)
        th.push_back(model.add_variable("th_" + detail::id_tag(bus.id, suffix), VarKind::continuous, bus.theta_min,
                                        bus.theta_max));
    for (const auto& br : net.branches)
        pb.push_back(model.add_variable("pb_" + detail::id_tag(br.id, suffix), VarKind::continuous, -br.p_b_max,
                                        br.p_b_max));

    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const auto& br = net.branches[k];
        const std::string t = detail::id_tag(br.id, suffix);
        {
            std::vector<Term> terms{{pb[k], 1.0}};
            double rhs = 0;
            detail::add_status(terms, rhs, status[k], -br.p_b_max);
            model.add_row(std::move(terms), Sense::le, rhs, "flow_cap_hi_" + t);
        }
        {
            std::vector<Term> terms{{pb[k], 1.0}};
            double rhs = 0;
            detail::add_status(terms, rhs, status[k], br.p_b_max);
            model.add_row(std::move(terms), Sense::ge, rhs, "flow_cap_lo_" + t);
        }
        const int ti = th[static_cast<std::size_t>(br.from - 1)];
        const int tj = th[static_cast<std::size_t>(br.to - 1)];
        {
            std::vector<Term> terms{{ti, br.b}, {tj, -br.b}, {pb[k], -1.0}};
            double rhs = -K;
            detail::add_status(terms, rhs, status[k], -K);
            model.add_row(std::move(terms), Sense::ge, rhs, "angle_lo_" + t);
        }
        {
            std::vector<Term> terms{{ti, br.b}, {tj, -br.b}, {pb[k], -1.0}};
            double rhs = K;
            detail::add_status(terms, rhs, status[k], K);
            model.add_row(std::move(terms), Sense::le, rhs, "angle_hi_" + t);
        }
    }

    std::vector<std::vector<Term>> balance(net.buses.size());
    for (std::size_t i = 0; i < net.buses.size(); ++i) balance[i].push_back({pg[i], 1.0});
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const auto& br = net.branches[k];
        balance[static_cast<std::size_t>(br.from - 1)].push_back({pb[k], -1.0});
        balance[static_cast<std::size_t>(br.to - 1)].push_back({pb[k], 1.0});
    }
    for (std::size_t i = 0; i < net.buses.size(); ++i)
        model.add_row(std::move(balance[i]), Sense::eq, net.buses[i].p_d,
                      "balance_" + detail::id_tag(net.buses[i].id, suffix));
}

inline void check_config(const Network& net, const SwitchConfig& config) {
    for (int id : config.switchable_ids)
        if (id < 1 || id > net.branch_count())
            throw ModelError("switch config names unknown branch " + std::to_string(id));
    if (!std::is_sorted(config.switchable_ids.begin(), config.switchable_ids.end()) ||
        std::adjacent_find(config.switchable_ids.begin(), config.switchable_ids.end()) !=
            config.switchable_ids.end())
        throw ModelError("switch config ids must be sorted and unique");
}

/// DC OTS: one binary status per branch (fixed at 1 unless switchable), dispatch,
/// angles and flows. Objective is generation cost plus c_b on switchable branches.
inline MilpModel build_base_ots(const Network& net, const SwitchConfig& config, const BigMPolicy& policy) {
    policy.validate();
    check_config(net, config);
    MilpModel model;
    for (const auto& br : net.branches) {
        const bool sw = config.contains(br.id);
        model.add_variable("z_" + std::to_string(br.id), VarKind::binary, sw ? 0.0 : 1.0, 1.0);
    }
    std::vector<EdgeStatus> status;
    for (std::size_t k = 0; k < net.branches.size(); ++k) status.push_back(EdgeStatus::variable(static_cast<int>(k)));
    add_dc_block(model, net, status, policy.K, "");
    for (const auto& bus : net.buses)
        if (bus.c_g != 0) model.add_objective(model.index_of("pg_" + std::to_string(bus.id)), bus.c_g);
    for (const auto& br : net.branches)
        if (config.contains(br.id) && br.c_b != 0) model.add_objective(z_var(model, br.id), br.c_b);
    return model;
}

/// Every bus keeps at least one incident branch in service.
inline void add_necessary_connectedness(MilpModel& model, const Network& net) {
    std::vector<std::vector<Term>> rows(net.buses.size());
    for (const auto& br : net.branches) {
        const int z = z_var(model, br.id);
        rows[static_cast<std::size_t>(br.from - 1)].push_back({z, 1.0});
        rows[static_cast<std::size_t>(br.to - 1)].push_back({z, 1.0});
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
        model.add_row(std::move(rows[i]), Sense::ge, 1.0, "degree_" + std::to_string(net.buses[i].id));
}

/// Verifies that c sums to zero over the whole (connected) graph and over no other
/// connected node-induced subgraph. The canonical vector is recognised directly.
inline void require_uniquely_balanced(const Multigraph& g, std::span<const double> c,
                                      std::size_t cap = default_nis_cap) {
    if (static_cast<int>(c.size()) != g.n) throw ModelError("injection vector length must equal node count");
    if (!is_connected(g)) throw ModelError("connectedness block needs a connected graph");
    const int n = g.n;
    int pivots = 0, ones = 0;
    for (double v : c) {
        if (v == 1.0) ++ones;
        else if (v == 1.0 - n) ++pivots;
    }
    if (n >= 2 && pivots == 1 && ones == n - 1) return;
    const auto cls = classify_balance(c, enumerate_connected_nis(g, std::nullopt, cap));
    if (cls.kind != BalanceKind::uniquely_balanced)
        throw ModelError("injection vector is not uniquely balanced for the graph");
}

struct BlockNames {
    std::string potential = "vth_";
    std::string flow = "rho_";
    std::string tag = "conn_";
    std::string suffix;
    std::vector<int> node_labels; // empty: 1..n
    std::vector<int> edge_labels; // empty: 1..|E|
};

/// Emits the exact connectedness block on `g`: free potentials and auxiliary flows with
/// big-M gating by edge status and flow conservation against c. Adds no binaries.
/// Returns the number of rows added.
inline int add_connectedness_block(MilpModel& model, const Multigraph& g, std::span<const double> c, double M,
                                   const std::vector<EdgeStatus>& status, const BlockNames& names) {
    if (!(M > 0)) throw ModelError("connectedness block: M must be positive");
    if (status.size() != g.edges.size()) throw ModelError("connectedness block: one status per edge required");
    const int before = model.row_count();
    auto node_label = [&](int i) { return names.node_labels.empty() ? i : names.node_labels.at(i - 1); };
    auto edge_label = [&](int k) { return names.edge_labels.empty() ? k + 1 : names.edge_labels.at(k); };

    std::vector<int> vth, rho;
    for (int i = 1; i <= g.n; ++i)
        vth.push_back(model.add_variable(names.potential + std::to_string(node_label(i)) + names.suffix,
                                         VarKind::continuous, -inf, inf));
    for (int k = 0; k < g.edge_count(); ++k)
        rho.push_back(model.add_variable(names.flow + std::to_string(edge_label(k)) + names.suffix,
                                         VarKind::continuous, -inf, inf));

    for (int k = 0; k < g.edge_count(); ++k) {
        const auto& e = g.edges[k];
        const std::string t = std::to_string(edge_label(k)) + names.suffix;
        const int vf = vth[static_cast<std::size_t>(e.from - 1)];
        const int vt = vth[static_cast<std::size_t>(e.to - 1)];
        {
            std::vector<Term> terms{{vf, 1.0}, {vt, -1.0}, {rho[k], -1.0}};
            double rhs = -M;
            detail::add_status(terms, rhs, status[k], -M);
            model.add_row(std::move(terms), Sense::ge, rhs, names.tag + "pot_lo_" + t);
        }
        {
            std::vector<Term> terms{{vf, 1.0}, {vt, -1.0}, {rho[k], -1.0}};
            double rhs = M;
            detail::add_status(terms, rhs, status[k], M);
            model.add_row(std::move(terms), Sense::le, rhs, names.tag + "pot_hi_" + t);
        }
        {
            std::vector<Term> terms{{rho[k], 1.0}};
            double rhs = 0;
            detail::add_status(terms, rhs, status[k], M);
            model.add_row(std::move(terms), Sense::ge, rhs, names.tag + "flow_lo_" + t);
        }
        {
            std::vector<Term> terms{{rho[k], 1.0}};
            double rhs = 0;
            detail::add_status(terms, rhs, status[k], -M);
            model.add_row(std::move(terms), Sense::le, rhs, names.tag + "flow_hi_" + t);
        }
    }
    std::vector<std::vector<Term>> bal(static_cast<std::size_t>(g.n));
    for (int k = 0; k < g.edge_count(); ++k) {
        bal[static_cast<std::size_t>(g.edges[k].from - 1)].push_back({rho[k], 1.0});
        bal[static_cast<std::size_t>(g.edges[k].to - 1)].push_back({rho[k], -1.0});
    }
    for (int i = 1; i <= g.n; ++i)
        model.add_row(std::move(bal[static_cast<std::size_t>(i - 1)]), Sense::eq, c[static_cast<std::size_t>(i - 1)],
                      names.tag + "bal_" + std::to_string(node_label(i)) + names.suffix);
    return model.row_count() - before;
}

/// Connectedness block over the network graph, tied to the branch statuses z_<id>.
/// Edge k of `g` is branch k+1.
inline void add_connectedness(MilpModel& model, const Multigraph& g, std::span<const double> c, double M) {
    require_uniquely_balanced(g, c);
    std::vector<EdgeStatus> st;
    for (int k = 1; k <= g.edge_count(); ++k) st.push_back(EdgeStatus::variable(model.index_of("z_" + std::to_string(k))));
    add_connectedness_block(model, g, c, M, st, {});
}

/// Post-contingency copies of the dispatch block, sharing the base statuses except for
/// the faulted branch, plus ramp limits between base and post-contingency generation.
inline void add_n_minus_1(MilpModel& model, const Network& net, const ContingencySet& contingencies,
                          const BigMPolicy& policy) {
    policy.validate();
    for (int kappa : contingencies.branch_ids) {
        if (kappa < 1 || kappa > net.branch_count())
            throw ModelError("contingency names unknown branch " + std::to_string(kappa));
        const std::string suffix = "_k" + std::to_string(kappa);
        add_dc_block(model, net, contingency_statuses(model, net, kappa), policy.K, suffix);
        for (const auto& bus : net.buses) {
            const int base = model.index_of("pg_" + std::to_string(bus.id));
            const int post = model.index_of("pg_" + std::to_string(bus.id) + suffix);
            model.add_row({{post, 1.0}, {base, -1.0}}, Sense::le, bus.r_up,
                          "ramp_up_" + std::to_string(bus.id) + suffix);
            model.add_row({{post, 1.0}, {base, -1.0}}, Sense::ge, -bus.r_down,
                          "ramp_dn_" + std::to_string(bus.id) + suffix);
        }
    }
}

/// One connectedness block per contingency with the faulted branch held open.
inline void add_contingency_connectedness(MilpModel& model, const Multigraph& g, const ContingencySet& contingencies,
                                          std::span<const double> c, double M) {
    if (contingencies.branch_ids.empty()) return;
    require_uniquely_balanced(g, c);
    for (int kappa : contingencies.branch_ids) {
        if (kappa < 1 || kappa > g.edge_count())
            throw ModelError("contingency names unknown branch " + std::to_string(kappa));
        std::vector<EdgeStatus> st;
        for (int k = 1; k <= g.edge_count(); ++k)
            st.push_back(k == kappa ? EdgeStatus::constant(0.0)
                                    : EdgeStatus::variable(model.index_of("z_" + std::to_string(k))));
        BlockNames names;
        names.suffix = "_k" + std::to_string(kappa);
        add_connectedness_block(model, g, c, M, st, names);
    }
}

/// Branch statuses of a solved model, in branch order.
inline Topology extract_topology(const MilpModel& model, const std::vector<double>& x, const Network& net) {
    Topology z;
    z.reserve(net.branches.size());
    for (const auto& br : net.branches) z.push_back(x.at(static_cast<std::size_t>(z_var(model, br.id))) > 0.5 ? 1 : 0);
    return z;
}

} // namespace ots
