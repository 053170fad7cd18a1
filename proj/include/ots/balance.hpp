#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ots/error.hpp"
#include "ots/graph.hpp"
#include "ots/grid_model.hpp"

namespace ots {

inline constexpr std::size_t default_nis_cap = 1'000'000;

/// Node sets of connected node-induced subgraphs. The full node set comes first
/// when the graph is connected; every other set is sorted ascending.
struct NisCatalog {
    std::vector<std::vector<int>> node_sets;
    std::size_t size() const { return node_sets.size(); }
};

namespace detail {

// Visits every connected induced node set of size <= max_nodes exactly once,
// extending from its smallest node with candidates larger than that node.
// `visit` returns false to stop early.
inline void for_each_connected_set(const Multigraph& g, int max_nodes,
                                   const std::function<bool(const std::vector<int>&)>& visit) {
    const auto adj = adjacency(g);
    std::vector<int> current;
    std::vector<char> seen(static_cast<std::size_t>(g.n) + 1, 0); // in current or in its neighbourhood
    bool stop = false;

    std::function<void(std::vector<int>, int)> extend = [&](std::vector<int> ext, int root) {
        if (stop) return;
        std::vector<int> sorted = current;
        std::sort(sorted.begin(), sorted.end());
        if (!visit(sorted)) {
            stop = true;
            return;
        }
        if (static_cast<int>(current.size()) >= max_nodes) return;
        while (!ext.empty() && !stop) {
            const int w = ext.back();
            ext.pop_back();
            std::vector<int> next_ext = ext;
            std::vector<int> added;
            for (int u : adj[w]) {
                if (u <= root || seen[u]) continue;
                seen[u] = 1;
                added.push_back(u);
                next_ext.push_back(u);
            }
            current.push_back(w);
            extend(std::move(next_ext), root);
            current.pop_back();
            for (int u : added) seen[u] = 0;
        }
    };

    for (int v = 1; v <= g.n && !stop; ++v) {
        current.assign(1, v);
        seen[v] = 1;
        std::vector<int> ext;
        for (int u : adj[v])
            if (u > v) {
                seen[u] = 1;
                ext.push_back(u);
            }
        // reverse so that smaller labels are popped first
        std::reverse(ext.begin(), ext.end());
        extend(ext, v);
        for (int u : adj[v]) seen[u] = 0;
        seen[v] = 0;
    }
}

} // namespace detail

/// All connected node-induced subgraphs with at most `max_nodes` nodes, preceded by the
/// whole node set when the graph is connected (regardless of the limit). Throws CapExceeded once more than `cap` sets would be produced.
inline NisCatalog enumerate_connected_nis(const Multigraph& g, std::optional<int> max_nodes = std::nullopt,
                                          std::size_t cap = default_nis_cap) {
    const int limit = max_nodes ? std::min(*max_nodes, g.n) : g.n;
    NisCatalog cat;
    const bool connected = is_connected(g);
    if (connected) {
        std::vector<int> all(static_cast<std::size_t>(g.n));
        std::iota(all.begin(), all.end(), 1);
        cat.node_sets.push_back(std::move(all));
    }
    detail::for_each_connected_set(g, limit, [&](const std::vector<int>& s) {
        if (connected && static_cast<int>(s.size()) == g.n) return true;
        if (cat.node_sets.size() >= cap)
            throw CapExceeded("enumerate_connected_nis: more than " + std::to_string(cap) +
                              " connected node sets; set max_nodes or raise the cap");
        cat.node_sets.push_back(s);
        return true;
    });
    return cat;
}

/// Row-per-set 0/1 membership matrix (sets x nodes).
inline Eigen::MatrixXd membership_matrix(const NisCatalog& cat, int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cat.size()), n);
    for (std::size_t i = 0; i < cat.size(); ++i)
        for (int v : cat.node_sets[i]) j(static_cast<Eigen::Index>(i), v - 1) = 1.0;
    return j;
}

enum class BalanceKind {
    uniquely_balanced, // only the whole-graph sum vanishes
    multiply_balanced, // the whole-graph sum and at least one other sum vanish
    unbalanced,        // no sum vanishes
    indefinite,        // some proper sum vanishes but the whole-graph sum does not
};

struct BalanceClass {
    BalanceKind kind = BalanceKind::unbalanced;
    int zero_count = 0;     // number of vanishing sums (N_m when multiply balanced)
    std::vector<double> b;  // per-set sums, catalog order
};

inline constexpr double balance_tol = 1e-9;

inline BalanceClass classify_balance(std::span<const double> c, const NisCatalog& cat, double tol = balance_tol) {
    if (!(tol > 0)) throw ModelError("classify_balance: tol must be positive");
    BalanceClass out;
    out.b.reserve(cat.size());
    bool first_zero = false;
    for (std::size_t i = 0; i < cat.size(); ++i) {
        double s = 0;
        for (int v : cat.node_sets[i]) {
            if (v < 1 || v > static_cast<int>(c.size()))
                throw ModelError("classify_balance: node outside the injection vector");
            s += c[v - 1];
        }
        out.b.push_back(s);
        if (std::abs(s) <= tol) {
            ++out.zero_count;
            if (i == 0) first_zero = true;
        }
    }
    if (out.zero_count == 0)
        out.kind = BalanceKind::unbalanced;
    else if (!first_zero)
        out.kind = BalanceKind::indefinite;
    else if (out.zero_count == 1)
        out.kind = BalanceKind::uniquely_balanced;
    else
        out.kind = BalanceKind::multiply_balanced;
    return out;
}

/// Whether L(g) theta = c is solvable: the minimum-norm least-squares solution must leave
/// a residual within tol * max(1, |c|_inf). Unit edge resistances.
inline bool potential_feasible(const Multigraph& g, std::span<const double> c, double tol = 1e-8) {
    if (static_cast<int>(c.size()) != g.n) throw ModelError("potential_feasible: |c| must equal node count");
    Multigraph unit = g;
    unit.weights.clear();
    const Eigen::MatrixXd l = laplacian(unit);
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(l);
    const Eigen::VectorXd theta = cod.solve(rhs);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    return (l * theta - rhs).cwiseAbs().maxCoeff() <= tol * scale;
}

struct InjectionInterval {
    double lo = 0;
    double hi = 0;
    bool excludes_zero() const { return lo > 0 || hi < 0; }
};

/// Range of sum(p_g - p_d) over a bus set for generation within bounds.
inline InjectionInterval injection_interval(std::span<const int> node_set, const Network& net) {
    InjectionInterval iv;
    for (int v : node_set) {
        const Bus& b = net.buses.at(static_cast<std::size_t>(v - 1));
        iv.lo += b.p_g_min - b.p_d;
        iv.hi += b.p_g_max - b.p_d;
    }
    return iv;
}

/// Interval test on the whole set: no admissible generation can zero its net injection.
inline bool is_unbalanced_nis(std::span<const int> node_set, const Network& net) {
    return !node_set.empty() && injection_interval(node_set, net).excludes_zero();
}

/// Full certificate: every connected node-induced subgraph of the set (the set itself
/// included) has a net-injection interval excluding zero. This is what licenses
/// contracting the set, since any island formed inside it must be able to export or
/// import power.
inline bool certify_unbalanced(std::span<const int> node_set, const Network& net,
                               std::size_t cap = default_nis_cap) {
    if (node_set.empty()) return false;
    bool all_neg = true, all_pos = true;
    for (int v : node_set) {
        const auto iv = injection_interval(std::span<const int>(&v, 1), net);
        if (!iv.excludes_zero()) return false;
        all_neg = all_neg && iv.hi < 0;
        all_pos = all_pos && iv.lo > 0;
    }
    if (all_neg || all_pos) return true; // every subset sum keeps the common sign

    // Mixed signs: check every connected subset explicitly.
    std::vector<int> sorted(node_set.begin(), node_set.end());
    std::sort(sorted.begin(), sorted.end());
    const Multigraph full = to_multigraph(net);
    Multigraph sub;
    sub.n = static_cast<int>(sorted.size());
    auto local = [&](int v) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        return (it != sorted.end() && *it == v) ? static_cast<int>(it - sorted.begin()) + 1 : 0;
    };
    for (const auto& e : full.edges) {
        const int a = local(e.from), b = local(e.to);
        if (a && b) sub.edges.push_back({a, b});
    }
    bool ok = true;
    std::size_t visited = 0;
    detail::for_each_connected_set(sub, sub.n, [&](const std::vector<int>& s) {
        if (++visited > cap) throw CapExceeded("certify_unbalanced: subset enumeration cap exceeded");
        std::vector<int> orig;
        orig.reserve(s.size());
        for (int v : s) orig.push_back(sorted[v - 1]);
        if (!injection_interval(orig, net).excludes_zero()) ok = false;
        return ok;
    });
    return ok;
}

} // namespace ots
