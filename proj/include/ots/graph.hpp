#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ots/error.hpp"

namespace ots {

/// Oriented edge between two 1-based node labels.
struct Edge {
    int from = 0;
    int to = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected multigraph with a fixed orientation per edge. Nodes are 1..n.
/// Parallel edges are allowed, self-loops are not.
struct Multigraph {
    int n = 0;
    std::vector<Edge> edges;
    std::vector<double> weights; // empty means unit weights

    int edge_count() const { return static_cast<int>(edges.size()); }

    void validate() const {
        if (n < 0) throw ValidationError("multigraph: negative node count");
        for (const auto& e : edges) {
            if (e.from < 1 || e.from > n || e.to < 1 || e.to > n)
                throw ValidationError("multigraph: edge endpoint out of range");
            if (e.from == e.to) throw ValidationError("multigraph: self-loop");
        }
        if (!weights.empty()) {
            if (weights.size() != edges.size())
                throw ValidationError("multigraph: weight count differs from edge count");
            for (double w : weights)
                if (!(w > 0)) throw ValidationError("multigraph: weights must be positive");
        }
    }
};

/// Branch status vector, one entry per edge, each 0 or 1.
using Topology = std::vector<std::uint8_t>;

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0), sets_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        --sets_;
        return true;
    }

    int set_count() const { return sets_; }

private:
    std::vector<int> parent_;
    std::vector<int> rank_;
    int sets_;
};

/// n x |edges| matrix with +1 at the tail and -1 at the head of every column.
inline Eigen::MatrixXd oriented_incidence(const Multigraph& g) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(g.n, g.edge_count());
    for (int k = 0; k < g.edge_count(); ++k) {
        e(g.edges[k].from - 1, k) = 1.0;
        e(g.edges[k].to - 1, k) = -1.0;
    }
    return e;
}

/// Weighted Laplacian E diag(w) E^T. Uses g.weights when `weights` is empty.
inline Eigen::MatrixXd laplacian(const Multigraph& g, std::span<const double> weights = {}) {
    if (weights.empty()) weights = g.weights;
    if (!weights.empty() && static_cast<int>(weights.size()) != g.edge_count())
        throw ValidationError("laplacian: weight count differs from edge count");
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.n, g.n);
    for (int k = 0; k < g.edge_count(); ++k) {
        const double w = weights.empty() ? 1.0 : weights[k];
        if (!(w > 0)) throw ValidationError("laplacian: weights must be positive");
        const int i = g.edges[k].from - 1;
        const int j = g.edges[k].to - 1;
        l(i, i) += w;
        l(j, j) += w;
        l(i, j) -= w;
        l(j, i) -= w;
    }
    return l;
}

/// Keeps every node and exactly the edges whose status is 1.
inline Multigraph edge_induced(const Multigraph& g, std::span<const std::uint8_t> z) {
    if (static_cast<int>(z.size()) != g.edge_count())
        throw ValidationError("edge_induced: topology length differs from edge count");
    Multigraph out;
    out.n = g.n;
    for (int k = 0; k < g.edge_count(); ++k) {
        if (!z[k]) continue;
        out.edges.push_back(g.edges[k]);
        if (!g.weights.empty()) out.weights.push_back(g.weights[k]);
    }
    return out;
}

/// Partition of the node labels; each component sorted, components ordered by smallest member.
inline std::vector<std::vector<int>> connected_components(const Multigraph& g) {
    DisjointSets ds(g.n);
    for (const auto& e : g.edges) ds.unite(e.from - 1, e.to - 1);
    std::vector<int> slot(static_cast<std::size_t>(g.n), -1);
    std::vector<std::vector<int>> parts;
    for (int v = 0; v < g.n; ++v) {
        const int r = ds.find(v);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(parts.size());
            parts.emplace_back();
        }
        parts[slot[r]].push_back(v + 1);
    }
    return parts;
}

inline int component_count(const Multigraph& g) {
    DisjointSets ds(g.n);
    for (const auto& e : g.edges) ds.unite(e.from - 1, e.to - 1);
    return ds.set_count();
}

inline bool is_connected(const Multigraph& g) { return g.n >= 1 && component_count(g) == 1; }

// Connectivity of the edge-induced subgraph without materialising it.
inline bool is_connected(const Multigraph& g, std::span<const std::uint8_t> z) {
    if (static_cast<int>(z.size()) != g.edge_count())
        throw ValidationError("is_connected: topology length differs from edge count");
    DisjointSets ds(g.n);
    for (int k = 0; k < g.edge_count(); ++k)
        if (z[k]) ds.unite(g.edges[k].from - 1, g.edges[k].to - 1);
    return g.n >= 1 && ds.set_count() == 1;
}

/// Adjacency lists (neighbour labels, 1-based, sorted, duplicates removed). Index 0 unused.
inline std::vector<std::vector<int>> adjacency(const Multigraph& g) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n) + 1);
    for (const auto& e : g.edges) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

/// True iff `nodes` (1-based, any order) induces a connected subgraph of g.
inline bool induces_connected(const Multigraph& g, std::span<const int> nodes) {
    if (nodes.empty()) return false;
    std::vector<int> local(static_cast<std::size_t>(g.n) + 1, -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);
    DisjointSets ds(static_cast<int>(nodes.size()));
    for (const auto& e : g.edges)
        if (local[e.from] >= 0 && local[e.to] >= 0) ds.unite(local[e.from], local[e.to]);
    return ds.set_count() == 1;
}

} // namespace ots
