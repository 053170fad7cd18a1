#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ots/balance.hpp"
#include "ots/constraints.hpp"
#include "ots/error.hpp"
#include "ots/graph.hpp"
#include "ots/milp_model.hpp"
#include "ots/random.hpp"
#include "ots/simplex.hpp"
#include "ots/solver.hpp"

namespace ots {

/// Feasibility of the stand-alone connectedness block for fixed edge statuses. The LP is
/// built once; each query only moves the bounds of the status variables.
class BlockOracle {
public:
    BlockOracle(const Multigraph& g, std::span<const double> c, double M) : edges_(g.edge_count()) {
        for (int k = 1; k <= g.edge_count(); ++k)
            model_.add_variable("z_" + std::to_string(k), VarKind::binary, 0, 1);
        add_connectedness(model_, g, c, M);
        lp_ = std::make_unique<lp::Simplex>(detail::to_lp(model_));
    }

    bool feasible(std::span<const std::uint8_t> z) {
        if (static_cast<int>(z.size()) != edges_) throw ModelError("BlockOracle: topology length mismatch");
        for (int k = 0; k < edges_; ++k) lp_->set_bounds(k, z[k], z[k]);
        return lp_->solve() == lp::Status::optimal;
    }

    const MilpModel& model() const { return model_; }

private:
    int edges_;
    MilpModel model_;
    std::unique_ptr<lp::Simplex> lp_;
};

struct SweepReport {
    long topologies = 0;
    long connected = 0;
    long block_mismatches = 0;  // LP block verdict differs from union-find
    long lemma_mismatches = 0;  // Laplacian residual test differs from union-find
    std::vector<Topology> examples; // first few mismatching topologies
    bool ok() const { return block_mismatches == 0 && lemma_mismatches == 0; }
};

/// Compares, per topology, union-find connectivity with the LP connectedness block and with
/// the Laplacian solvability test. Exhaustive over 2^|E| topologies, or `samples` uniform draws.
inline SweepReport connectivity_sweep(const Multigraph& g, int pivot, double M, bool exhaustive, long samples = 256,
                                      std::uint64_t seed = 1) {
    const int m = g.edge_count();
    if (exhaustive && m > 24) throw CapExceeded("connectivity_sweep: too many edges for an exhaustive sweep");
    const auto c = make_uniquely_balanced_c(g.n, pivot);
    BlockOracle oracle(g, c, M);
    SweepReport rep;
    auto check = [&](const Topology& z) {
        ++rep.topologies;
        const bool conn = is_connected(g, z);
        rep.connected += conn;
        const bool block = oracle.feasible(z);
        const bool lemma = potential_feasible(edge_induced(g, z), c);
        rep.block_mismatches += block != conn;
        rep.lemma_mismatches += lemma != conn;
        if ((block != conn || lemma != conn) && rep.examples.size() < 8) rep.examples.push_back(z);
    };
    Topology z(static_cast<std::size_t>(m), 0);
    if (exhaustive) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
            for (int k = 0; k < m; ++k) z[k] = (mask >> k) & 1U;
            check(z);
        }
    } else {
        std::mt19937_64 rng(seed);
        for (long s = 0; s < samples; ++s) {
            for (int k = 0; k < m; ++k) z[k] = static_cast<std::uint8_t>(uniform_below(rng, 2));
            check(z);
        }
    }
    return rep;
}

} // namespace ots
