#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ots/balance.hpp"
#include "ots/constraints.hpp"
#include "ots/error.hpp"
#include "ots/graph.hpp"
#include "ots/grid_model.hpp"
#include "ots/milp_model.hpp"
#include "ots/random.hpp"
#include "ots/simplex.hpp"
#include "ots/solver.hpp"

namespace ots {

enum class NisStrategy { exhaustive, seeded };

inline const char* to_string(NisStrategy s) { return s == NisStrategy::exhaustive ? "exhaustive" : "seeded"; }

struct NisSearch {
    NisStrategy strategy = NisStrategy::exhaustive;
    int max_nodes = 10;              // exhaustive: largest candidate; seeded: growth limit
    std::size_t cap = default_nis_cap;
};

/// Disjoint certified unbalanced NISs with their boundary nodes (members with a branch leaving the set).
struct UnbalancedNisSet {
    std::vector<std::vector<int>> node_sets;
    std::vector<std::vector<int>> boundary_sets;
};

inline std::vector<int> boundary_nodes(const Multigraph& g, std::span<const int> set) {
    std::vector<char> in(static_cast<std::size_t>(g.n) + 1, 0);
    for (int v : set) in[v] = 1;
    std::set<int> out;
    for (const auto& e : g.edges) {
        if (in[e.from] && !in[e.to]) out.insert(e.from);
        if (in[e.to] && !in[e.from]) out.insert(e.to);
    }
    return {out.begin(), out.end()};
}

/// Whether the boundary nodes of `set` are joined to each other by non-switchable branches
/// lying inside the set. Contracting a set whose boundary can be split by switching its
/// internal branches is not exact, so such sets are never contracted.
inline bool boundary_fixed_connected(const Network& net, const SwitchConfig& config, std::span<const int> set,
                                     std::span<const int> boundary) {
    if (boundary.size() <= 1) return true;
    std::vector<char> in(static_cast<std::size_t>(net.bus_count()) + 1, 0);
    for (int v : set) in[v] = 1;
    DisjointSets ds(net.bus_count());
    for (const auto& br : net.branches)
        if (in[br.from] && in[br.to] && !config.contains(br.id)) ds.unite(br.from - 1, br.to - 1);
    const int root = ds.find(boundary.front() - 1);
    return std::all_of(boundary.begin(), boundary.end(), [&](int v) { return ds.find(v - 1) == root; });
}

namespace detail {

inline std::string fmt_set(std::span<const int> s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "}";
}

inline std::string fmt_path(std::span<const int> nodes) {
    std::string out = "{";
    for (std::size_t i = 1; i < nodes.size(); ++i)
        out += (i > 1 ? "," : "") + std::to_string(nodes[i - 1]) + "-" + std::to_string(nodes[i]);
    return out + "}";
}

// A set is worth contracting when it is a proper multi-node subset with a boundary and
// its boundary stays joined through fixed internal branches.
inline bool contractible(const Network& net, const SwitchConfig& config, const Multigraph& g,
                         std::span<const int> set) {
    if (set.size() < 2 || static_cast<int>(set.size()) >= g.n) return false;
    const auto b = boundary_nodes(g, set);
    return !b.empty() && boundary_fixed_connected(net, config, set, b);
}

} // namespace detail

/// Disjoint family of certified unbalanced connected NISs whose contraction is exact under
/// `config`. Exhaustive: every connected set up to max_nodes, greedy largest-first with the
/// lowest smallest member breaking ties. Seeded: grows regions from buses whose own
/// injection interval excludes zero, adding the lowest-labelled neighbour that keeps the
/// region certified.
inline UnbalancedNisSet find_unbalanced_nis(const Network& net, const SwitchConfig& config,
                                            const NisSearch& search = {}) {
    const Multigraph g = to_multigraph(net);
    UnbalancedNisSet out;
    std::vector<std::vector<int>> chosen;

    if (search.strategy == NisStrategy::exhaustive) {
        const auto cat = enumerate_connected_nis(g, search.max_nodes, search.cap);
        std::vector<std::vector<int>> cands;
        for (const auto& s : cat.node_sets)
            if (detail::contractible(net, config, g, s) && certify_unbalanced(s, net, search.cap)) cands.push_back(s);
        std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() > b.size();
            return a < b;
        });
        std::vector<char> used(static_cast<std::size_t>(g.n) + 1, 0);
        for (const auto& s : cands) {
            if (std::any_of(s.begin(), s.end(), [&](int v) { return used[v]; })) continue;
            for (int v : s) used[v] = 1;
            chosen.push_back(s);
        }
    } else {
        const auto adj = adjacency(g);
        std::vector<char> used(static_cast<std::size_t>(g.n) + 1, 0);
        for (int v = 1; v <= g.n; ++v) {
            if (used[v]) continue;
            const int one[1] = {v};
            if (!injection_interval(one, net).excludes_zero()) continue;
            std::vector<int> region{v};
            bool grown = true;
            while (grown && static_cast<int>(region.size()) < std::min(search.max_nodes, g.n - 1)) {
                grown = false;
                std::set<int> frontier;
                for (int u : region)
                    for (int w : adj[u])
                        if (!used[w] && !std::binary_search(region.begin(), region.end(), w)) frontier.insert(w);
                for (int w : frontier) {
                    auto trial = region;
                    trial.insert(std::lower_bound(trial.begin(), trial.end(), w), w);
                    if (certify_unbalanced(trial, net, search.cap)) {
                        region = std::move(trial);
                        grown = true;
                        break;
                    }
                }
            }
            if (!detail::contractible(net, config, g, region)) continue;
            for (int u : region) used[u] = 1;
            chosen.push_back(std::move(region));
        }
    }
    std::sort(chosen.begin(), chosen.end());
    for (auto& s : chosen) {
        out.boundary_sets.push_back(boundary_nodes(g, s));
        out.node_sets.push_back(std::move(s));
    }
    return out;
}

/// Contracted graph G' and the bookkeeping that ties its edges back to branch statuses.
struct ReductionPlan {
    Multigraph contracted;
    std::vector<int> node_map;    // original bus -> contracted node (index 0 unused)
    std::vector<int> node_label;  // contracted node -> representative original bus
    std::vector<int> edge_branch; // contracted edge -> original branch id, 0 for fixed connector edges
    std::vector<int> fixed_edges; // indices of connector edges, status constant 1
    UnbalancedNisSet contracted_sets;
    std::vector<std::string> steps;

    std::string audit_log() const {
        std::string s;
        for (const auto& line : steps) s += line + "\n";
        return s;
    }
};

struct ContractOptions {
    bool guard_boundary = true; // refuse sets whose boundary is not joined by fixed branches
};

/// Builds G' from the network: certified sets collapse onto their boundary nodes joined by a
/// path, components of the always-on subgraph collapse onto the endpoints of switchable
/// branches that leave them, again joined by a path.
inline ReductionPlan contract(const Network& net, const SwitchConfig& config, const UnbalancedNisSet& nis_set,
                              const ContractOptions& opts = {}) {
    const Multigraph g = to_multigraph(net);
    const int n = g.n;
    if (nis_set.boundary_sets.size() != nis_set.node_sets.size())
        throw ModelError("contract: boundary sets do not match node sets");
    ReductionPlan plan;

    std::vector<int> owner(static_cast<std::size_t>(n) + 1, -1); // contracted set index per node
    for (std::size_t s = 0; s < nis_set.node_sets.size(); ++s) {
        const auto& set = nis_set.node_sets[s];
        for (int v : set) {
            if (v < 1 || v > n) throw ModelError("contract: node outside the network");
            if (owner[v] >= 0) throw ModelError("contract: node sets overlap at bus " + std::to_string(v));
            owner[v] = static_cast<int>(s);
        }
        if (!induces_connected(g, set)) throw ModelError("contract: node set " + detail::fmt_set(set) + " is not connected");
    }

    // S1: replace each accepted set by its boundary nodes and a connector path.
    struct OEdge {
        int from, to;
        int branch; // 0 for connectors
    };
    std::vector<char> alive(static_cast<std::size_t>(n) + 1, 1);
    std::vector<int> absorbed_by(static_cast<std::size_t>(n) + 1, 0); // interior node -> its lowest boundary node
    std::vector<OEdge> go;
    std::vector<char> accepted(nis_set.node_sets.size(), 0);
    for (std::size_t s = 0; s < nis_set.node_sets.size(); ++s) {
        const auto& set = nis_set.node_sets[s];
        const auto boundary = boundary_nodes(g, set);
        if (boundary.empty()) {
            plan.steps.push_back("S1 skip nodes=" + detail::fmt_set(set) + " reason=no boundary");
            continue;
        }
        if (opts.guard_boundary && !boundary_fixed_connected(net, config, set, boundary)) {
            plan.steps.push_back("S1 skip nodes=" + detail::fmt_set(set) + " boundary=" + detail::fmt_set(boundary) +
                                 " reason=boundary not joined by fixed branches");
            continue;
        }
        accepted[s] = 1;
        plan.contracted_sets.node_sets.push_back(set);
        plan.contracted_sets.boundary_sets.push_back(boundary);
        for (int v : set)
            if (!std::binary_search(boundary.begin(), boundary.end(), v)) {
                alive[v] = 0;
                absorbed_by[v] = boundary.front();
            }
        for (std::size_t i = 1; i < boundary.size(); ++i) go.push_back({boundary[i - 1], boundary[i], 0});
        plan.steps.push_back("S1 contract nodes=" + detail::fmt_set(set) + " boundary=" + detail::fmt_set(boundary) +
                             " connector=" + detail::fmt_path(boundary));
    }
    for (const auto& br : net.branches) {
        const int a = owner[br.from], b = owner[br.to];
        if (a >= 0 && a == b && accepted[a]) continue; // internal to a contracted set
        go.push_back({br.from, br.to, br.id});
    }

    // S2: components of the always-on subgraph; switchable branches between them form E_l.
    DisjointSets ds(n);
    for (const auto& e : go)
        if (e.branch == 0 || !config.contains(e.branch)) ds.unite(e.from - 1, e.to - 1);
    std::vector<int> crossing, internal;
    for (const auto& e : go) {
        if (e.branch == 0 || !config.contains(e.branch)) continue;
        (ds.find(e.from - 1) != ds.find(e.to - 1) ? crossing : internal).push_back(e.branch);
    }
    std::sort(crossing.begin(), crossing.end());
    std::sort(internal.begin(), internal.end());
    std::map<int, std::vector<int>> comp_nodes; // root -> alive members
    for (int v = 1; v <= n; ++v)
        if (alive[v]) comp_nodes[ds.find(v - 1)].push_back(v);
    std::vector<std::vector<int>> comps;
    for (auto& [root, members] : comp_nodes) comps.push_back(members);
    std::sort(comps.begin(), comps.end());
    plan.steps.push_back("S2 components=" + std::to_string(comps.size()) + " crossing=" + detail::fmt_set(crossing) +
                         " internal-switchable=" + detail::fmt_set(internal));

    // S3: keep only endpoints of crossing branches (or the lowest node of an isolated component).
    std::vector<char> incident(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : go)
        if (e.branch != 0 && std::binary_search(crossing.begin(), crossing.end(), e.branch))
            incident[e.from] = incident[e.to] = 1;
    std::vector<std::vector<int>> keep(comps.size());
    std::vector<int> comp_of(static_cast<std::size_t>(n) + 1, -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (int v : comps[c]) {
            comp_of[v] = static_cast<int>(c);
            if (incident[v]) keep[c].push_back(v);
        }
        if (keep[c].empty()) keep[c].push_back(comps[c].front());
        plan.steps.push_back("S3 component nodes=" + detail::fmt_set(comps[c]) + " keep=" + detail::fmt_set(keep[c]) +
                             " connector=" + detail::fmt_path(keep[c]));
    }

    // S4: assemble G' with nodes relabelled in ascending bus order.
    std::vector<int> kept;
    for (const auto& k : keep) kept.insert(kept.end(), k.begin(), k.end());
    std::sort(kept.begin(), kept.end());
    std::vector<int> new_id(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t i = 0; i < kept.size(); ++i) new_id[kept[i]] = static_cast<int>(i) + 1;
    plan.node_label = kept;
    plan.contracted.n = static_cast<int>(kept.size());
    for (const auto& br : net.branches)
        if (std::binary_search(crossing.begin(), crossing.end(), br.id)) {
            plan.contracted.edges.push_back({new_id[br.from], new_id[br.to]});
            plan.edge_branch.push_back(br.id);
        }
    for (const auto& k : keep)
        for (std::size_t i = 1; i < k.size(); ++i) {
            plan.fixed_edges.push_back(plan.contracted.edge_count());
            plan.contracted.edges.push_back({new_id[k[i - 1]], new_id[k[i]]});
            plan.edge_branch.push_back(0);
        }
    plan.node_map.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int v = 1; v <= n; ++v) {
        const int anchor = alive[v] ? v : absorbed_by[v];
        plan.node_map[v] = new_id[anchor] ? new_id[anchor] : new_id[keep[comp_of[anchor]].front()];
    }
    plan.steps.push_back("S4 nodes=" + std::to_string(plan.contracted.n) +
                         " edges=" + std::to_string(plan.contracted.edge_count()) +
                         " free=" + std::to_string(crossing.size()) + " fixed=" + std::to_string(plan.fixed_edges.size()));
    return plan;
}

/// Status vector of G' implied by a branch topology (fixed connector edges are on).
inline Topology reduced_topology(const ReductionPlan& plan, std::span<const std::uint8_t> z) {
    Topology out;
    out.reserve(plan.edge_branch.size());
    for (int b : plan.edge_branch) out.push_back(b == 0 ? 1 : z[static_cast<std::size_t>(b - 1)]);
    return out;
}

/// Connectedness block on G' tied to the original branch statuses. `pivot` is a bus of the
/// original network; `kappa` (if set) is a branch held open. Emits nothing when G' has a
/// single node. Returns the number of rows added.
inline int reduced_connectedness(MilpModel& model, const ReductionPlan& plan, int pivot, double M,
                                 std::optional<int> kappa = std::nullopt) {
    const Multigraph& gp = plan.contracted;
    if (gp.n < 2) return 0;
    if (pivot < 1 || pivot >= static_cast<int>(plan.node_map.size()))
        throw ModelError("reduced_connectedness: pivot bus out of range");
    const auto c = make_uniquely_balanced_c(gp.n, plan.node_map[pivot]);
    std::vector<EdgeStatus> st;
    for (int b : plan.edge_branch) {
        if (b == 0) st.push_back(EdgeStatus::constant(1.0));
        else if (kappa && b == *kappa) st.push_back(EdgeStatus::constant(0.0));
        else st.push_back(EdgeStatus::variable(z_var(model, b)));
    }
    require_uniquely_balanced(gp, c);
    BlockNames names;
    names.potential = "rvth_";
    names.flow = "rrho_";
    names.tag = "rconn_";
    names.node_labels = plan.node_label;
    if (kappa) names.suffix = "_k" + std::to_string(*kappa);
    return add_connectedness_block(model, gp, c, M, st, names);
}

struct EquivalenceReport {
    int attempts = 0;
    int feasible = 0;           // sampled topologies admitting a dispatch
    int connected = 0;          // of those, connected in the original graph
    std::vector<Topology> mismatches;
    bool ok() const { return mismatches.empty(); }
};

/// Samples branch topologies (unswitchable branches on), keeps those for which the dispatch
/// LP is feasible, and compares connectivity of G_z with that of G'_{z'}.
inline EquivalenceReport equivalence_check(const Network& net, const SwitchConfig& config, const ReductionPlan& plan,
                                           int sample_count, std::uint64_t seed, long max_attempts = -1) {
    EquivalenceReport rep;
    const Multigraph g = to_multigraph(net);
    const MilpModel model = build_base_ots(net, config, default_policy(net));
    lp::Simplex lp(detail::to_lp(model));
    std::vector<int> zv;
    for (const auto& br : net.branches) zv.push_back(z_var(model, br.id));
    if (max_attempts < 0) max_attempts = 200L * std::max(1, sample_count);
    std::mt19937_64 rng(seed);

    while (rep.feasible < sample_count && rep.attempts < max_attempts) {
        ++rep.attempts;
        const double p_on = 0.2 + 0.8 * uniform_unit(rng);
        Topology z(net.branches.size(), 1);
        for (const auto& br : net.branches)
            if (config.contains(br.id)) z[br.id - 1] = uniform_unit(rng) < p_on ? 1 : 0;
        for (std::size_t k = 0; k < z.size(); ++k) lp.set_bounds(zv[k], z[k], z[k]);
        if (lp.solve() != lp::Status::optimal) continue;
        ++rep.feasible;
        const bool full = is_connected(g, z);
        rep.connected += full;
        const auto zr = reduced_topology(plan, z);
        if (full != is_connected(plan.contracted, zr)) rep.mismatches.push_back(z);
    }
    return rep;
}

} // namespace ots
