#pragma once

#include <string>
#include <vector>

#include "oracles.hpp"
#include "ots/ots.hpp"

namespace support {

inline oracle::EdgeList edge_list(const ots::Multigraph& g) {
    oracle::EdgeList out;
    for (const auto& e : g.edges) out.push_back({e.from, e.to});
    return out;
}

inline ots::Multigraph graph(int n, const oracle::EdgeList& edges) {
    ots::Multigraph g;
    g.n = n;
    for (const auto& [a, b] : edges) g.edges.push_back({a, b});
    return g;
}

// First `binaries` columns become binary variables b<j>, the rest continuous x<j>.
inline ots::MilpModel to_model(const oracle::DenseLp& lp, int binaries) {
    ots::MilpModel m;
    for (std::size_t j = 0; j < lp.c.size(); ++j) {
        const bool bin = static_cast<int>(j) < binaries;
        m.add_variable((bin ? "b" : "x") + std::to_string(j), bin ? ots::VarKind::binary : ots::VarKind::continuous,
                       lp.xl[j], lp.xu[j]);
        if (lp.c[j] != 0) m.add_objective(static_cast<int>(j), lp.c[j]);
    }
    for (std::size_t i = 0; i < lp.a.size(); ++i) {
        std::vector<ots::Term> terms;
        for (std::size_t j = 0; j < lp.c.size(); ++j)
            if (lp.a[i][j] != 0) terms.push_back({static_cast<int>(j), lp.a[i][j]});
        const std::string tag = "r" + std::to_string(i);
        if (lp.lo[i] == lp.hi[i]) {
            m.add_row(terms, ots::Sense::eq, lp.lo[i], tag);
        } else {
            if (std::isfinite(lp.lo[i])) m.add_row(terms, ots::Sense::ge, lp.lo[i], tag + "_lo");
            if (std::isfinite(lp.hi[i])) m.add_row(terms, ots::Sense::le, lp.hi[i], tag + "_hi");
        }
    }
    return m;
}

// Random bounded mini MILP with integer data.
inline oracle::DenseLp random_mini(std::mt19937_64& rng, int binaries, int continuous, int rows) {
    std::uniform_int_distribution<int> coef(-5, 5), cost(-6, 6), ub(1, 6);
    oracle::DenseLp lp;
    const int n = binaries + continuous;
    for (int j = 0; j < n; ++j) {
        lp.c.push_back(cost(rng));
        lp.xl.push_back(0);
        lp.xu.push_back(j < binaries ? 1 : ub(rng));
    }
    for (int i = 0; i < rows; ++i) {
        std::vector<double> a(static_cast<std::size_t>(n));
        double at_half = 0;
        for (int j = 0; j < n; ++j) {
            a[j] = coef(rng);
            at_half += a[j] * 0.5 * lp.xu[j];
        }
        lp.a.push_back(a);
        // keep roughly half of the rows loose around the box centre
        const double slackness = std::uniform_int_distribution<int>(0, 4)(rng);
        if (i % 2) {
            lp.lo.push_back(-std::numeric_limits<double>::infinity());
            lp.hi.push_back(std::floor(at_half) + slackness);
        } else {
            lp.lo.push_back(std::ceil(at_half) - slackness);
            lp.hi.push_back(std::numeric_limits<double>::infinity());
        }
    }
    return lp;
}

} // namespace support
