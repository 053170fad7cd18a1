#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace {

ots::Network two_bus(bool switchable) {
    ots::Network net;
    net.buses = {{1, 0, 0, 5, 3, -1, 1, 0, 0}, {2, 2, 0, 0, 0, -1, 1, 0, 0}};
    net.branches = {{1, 1, 2, 10, 5, switchable, 1}};
    return net;
}

ots::Solution solve_variant(ots::ModelVariant v, const ots::Network& net, const ots::SwitchConfig& cfg) {
    const auto a = ots::assemble(v, net, cfg, ots::default_contingencies(net), ots::default_policy(net));
    return ots::solve(a.model);
}

// sum of pg over buses, read by name
double total_generation(const ots::Solution& s, const ots::Network& net, const std::string& suffix = "") {
    double t = 0;
    for (const auto& b : net.buses) t += s.value("pg_" + std::to_string(b.id) + suffix);
    return t;
}

} // namespace

TEST(BigM, DefaultsFollowDataBounds) {
    const auto net = ots::make_fixture("fig1");
    // b_max 100, theta span 2
    EXPECT_DOUBLE_EQ(ots::default_k(net), 201);
    // canonical c on n nodes: |c|_1 = 2(n-1), |c|_inf = n-1
    for (int n = 2; n <= 9; ++n) EXPECT_DOUBLE_EQ(ots::default_m(n), std::max(2.0 * (n - 1), (n - 1.0) * (n - 1)) + 1);
    EXPECT_THROW((ots::BigMPolicy{0, 1}.validate()), ots::ModelError);
    EXPECT_THROW((ots::BigMPolicy{1, ots::inf}.validate()), ots::ModelError);
}

TEST(BaseModel, TwoBusDispatchByHand) {
    // fixed line: generator at bus 1 serves 2 units at cost 3
    auto net = two_bus(false);
    auto sol = solve_variant(ots::ModelVariant::M1, net, ots::config_from_flags(net));
    ASSERT_EQ(sol.status, ots::SolveStatus::optimal);
    EXPECT_NEAR(sol.objective, 6, 1e-9);
    EXPECT_NEAR(sol.value("pb_1"), 2, 1e-9);
    // flow = b (th1 - th2)
    EXPECT_NEAR(10 * (sol.value("th_1") - sol.value("th_2")), 2, 1e-9);
    // switchable line must stay closed to serve load; its cost 1 is added
    net = two_bus(true);
    sol = solve_variant(ots::ModelVariant::M1, net, ots::config_from_flags(net));
    EXPECT_NEAR(sol.objective, 7, 1e-9);
    EXPECT_NEAR(sol.value("z_1"), 1, 1e-9);
    // demand above capacity
    net.buses[1].p_d = 6;
    EXPECT_EQ(solve_variant(ots::ModelVariant::M1, net, ots::config_from_flags(net)).status,
              ots::SolveStatus::infeasible);
}

TEST(BaseModel, UnswitchableBranchesAreFixedOn) {
    const auto net = ots::make_fixture("nis-demo");
    const auto cfg = ots::config_from_flags(net);
    const auto m = ots::build_base_ots(net, cfg, ots::default_policy(net));
    for (const auto& br : net.branches) {
        const auto& v = m.variables()[ots::z_var(m, br.id)];
        EXPECT_EQ(v.kind, ots::VarKind::binary);
        EXPECT_DOUBLE_EQ(v.lower, br.switchable ? 0.0 : 1.0);
    }
    EXPECT_THROW(ots::build_base_ots(net, ots::SwitchConfig{{13}}, ots::default_policy(net)), ots::ModelError);
    EXPECT_THROW(ots::build_base_ots(net, ots::SwitchConfig{{3, 2}}, ots::default_policy(net)), ots::ModelError);
}

TEST(ConnectednessBlock, AddsOnlyContinuousVariablesWithExpectedCounts) {
    for (const auto& name : ots::fixture_names()) {
        const auto net = ots::make_fixture(name);
        const auto cfg = ots::config_from_flags(net);
        const auto pol = ots::default_policy(net);
        const auto cont = ots::default_contingencies(net);
        const auto m1 = ots::assemble(ots::ModelVariant::M1, net, cfg, cont, pol);
        const auto m2 = ots::assemble(ots::ModelVariant::M2, net, cfg, cont, pol);
        const auto m3 = ots::assemble(ots::ModelVariant::M3, net, cfg, cont, pol);
        const int nn = net.bus_count(), ne = net.branch_count();
        EXPECT_EQ(m2.model.row_count() - m1.model.row_count(), nn) << name;
        EXPECT_EQ(m3.model.variable_count() - m1.model.variable_count(), nn + ne) << name;
        EXPECT_EQ(m3.model.row_count() - m1.model.row_count(), 4 * ne + nn) << name;
        EXPECT_EQ(m3.connectedness_rows, 4 * ne + nn);
        EXPECT_EQ(m3.connectedness_vars, nn + ne);
        EXPECT_EQ(m3.model.binary_count(), m1.model.binary_count()) << name;

        const auto n1 = ots::assemble(ots::ModelVariant::N1, net, cfg, cont, pol);
        const auto n3 = ots::assemble(ots::ModelVariant::N3, net, cfg, cont, pol);
        const int nk = static_cast<int>(cont.branch_ids.size());
        // per contingency: dispatch copy (2 nn + ne variables, 4 ne + nn rows) and 2 nn ramp rows
        EXPECT_EQ(n1.model.variable_count() - m1.model.variable_count(), nk * (2 * nn + ne)) << name;
        EXPECT_EQ(n1.model.row_count() - m1.model.row_count(), nk * (4 * ne + 3 * nn)) << name;
        EXPECT_EQ(n3.connectedness_rows, (nk + 1) * (4 * ne + nn)) << name;
        EXPECT_EQ(n3.model.binary_count(), m1.model.binary_count()) << name;
    }
}

TEST(ConnectednessBlock, FeasibleExactlyOnConnectedTopologies) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 4 + trial % 2;
        const auto edges = oracle::random_connected(n, n + 2, rng);
        const auto g = support::graph(n, edges);
        ots::BlockOracle block(g, ots::make_uniquely_balanced_c(n, 1 + trial % n), ots::default_m(n));
        for (std::uint32_t mask = 0; mask < (1U << edges.size()); ++mask) {
            ots::Topology z(edges.size());
            std::vector<std::uint8_t> on(edges.size());
            for (std::size_t k = 0; k < edges.size(); ++k) on[k] = z[k] = mask >> k & 1U;
            ASSERT_EQ(block.feasible(z), oracle::connected(n, edges, on)) << trial << " " << mask;
        }
    }
}

TEST(ConnectednessBlock, TooSmallMCutsConnectedTopologies) {
    // path 1-2-3-4-5 with pivot at an end: the edge next to the pivot carries n-1 = 4 units
    const auto g = support::graph(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}});
    const ots::Topology all(4, 1);
    ots::BlockOracle tight(g, ots::make_uniquely_balanced_c(5, 1), 3.5);
    EXPECT_FALSE(tight.feasible(all));
    ots::BlockOracle safe(g, ots::make_uniquely_balanced_c(5, 1), ots::default_m(5));
    EXPECT_TRUE(safe.feasible(all));
}

TEST(ConnectednessBlock, RejectsMultiplyBalancedInjection) {
    const auto g = support::graph(4, {{1, 2}, {2, 3}, {3, 4}});
    ots::MilpModel m;
    for (int k = 1; k <= 3; ++k) m.add_variable("z_" + std::to_string(k), ots::VarKind::binary, 0, 1);
    EXPECT_THROW(ots::add_connectedness(m, g, std::vector<double>{1, -1, 1, -1}, 10), ots::ModelError);
    EXPECT_THROW(ots::add_connectedness(m, g, std::vector<double>{1, 1, 1}, 10), ots::ModelError);
    // a non-canonical uniquely balanced vector is accepted after enumeration
    EXPECT_NO_THROW(ots::add_connectedness(m, g, std::vector<double>{-7, 2, 2, 3}, 20));
}

TEST(Variants, FeasibleRegionsNestAndObjectivesIncrease) {
    for (const auto& name : ots::fixture_names()) {
        const auto net = ots::make_fixture(name);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto cfg = ots::sample_switchable(net, 0.5, seed);
            double prev = -ots::inf;
            for (auto v : {ots::ModelVariant::M1, ots::ModelVariant::M2, ots::ModelVariant::M3}) {
                const auto s = solve_variant(v, net, cfg);
                ASSERT_EQ(s.status, ots::SolveStatus::optimal) << name << " " << ots::to_string(v);
                EXPECT_GE(s.objective, prev - 1e-6) << name;
                prev = s.objective;
            }
            const auto n1 = solve_variant(ots::ModelVariant::N1, net, cfg);
            const auto m1 = solve_variant(ots::ModelVariant::M1, net, cfg);
            if (n1.status == ots::SolveStatus::optimal) { EXPECT_GE(n1.objective, m1.objective - 1e-6) << name; }
        }
    }
}

TEST(Variants, Fig1CostsOfConnectivity) {
    const auto net = ots::make_fixture("fig1");
    const auto cfg = ots::config_from_flags(net);
    const auto g = ots::to_multigraph(net);
    const auto pol = ots::default_policy(net);
    const auto cont = ots::default_contingencies(net);
    // 80 units of load served at cost 10; islanding avoids the switching cost 5
    const double want[] = {800, 800, 805, 805};
    const ots::ModelVariant vs[] = {ots::ModelVariant::M1, ots::ModelVariant::M2, ots::ModelVariant::M3,
                                    ots::ModelVariant::M4};
    for (int i = 0; i < 4; ++i) {
        const auto a = ots::assemble(vs[i], net, cfg, cont, pol);
        const auto s = ots::solve(a.model);
        ASSERT_EQ(s.status, ots::SolveStatus::optimal);
        EXPECT_NEAR(s.objective, want[i], 1e-6) << ots::to_string(vs[i]);
        EXPECT_EQ(ots::is_connected(g, ots::extract_topology(a.model, s.x, net)), i >= 2) << ots::to_string(vs[i]);
        EXPECT_TRUE(ots::check_solution(a.model, s.x).ok());
    }
}

TEST(Contingencies, Cycle3RampCoupling) {
    auto net = ots::make_fixture("cycle3");
    const auto cfg = ots::config_from_flags(net);
    const auto m1 = solve_variant(ots::ModelVariant::M1, net, cfg);
    ASSERT_EQ(m1.status, ots::SolveStatus::optimal);
    // all 60 units from the cheap bus: 40 on the direct line, 20 around the path
    EXPECT_NEAR(m1.objective, 600, 1e-6);
    // losing 1-3 leaves 30 units of path capacity, ramp 10: p1 <= 40, p3 >= 20
    const auto n1 = solve_variant(ots::ModelVariant::N1, net, cfg);
    ASSERT_EQ(n1.status, ots::SolveStatus::optimal);
    EXPECT_NEAR(n1.objective, 40 * 10 + 20 * 50, 1e-6);
    EXPECT_NEAR(total_generation(n1, net), 60, 1e-6);
    for (int kappa : ots::default_contingencies(net).branch_ids) {
        const std::string k = "_k" + std::to_string(kappa);
        EXPECT_NEAR(total_generation(n1, net, k), 60, 1e-6);
        EXPECT_NEAR(n1.value("pb_" + std::to_string(kappa) + k), 0, 1e-9);
    }
    for (auto& b : net.buses) b.r_up = b.r_down = 0;
    const auto frozen = solve_variant(ots::ModelVariant::N1, net, cfg);
    ASSERT_EQ(frozen.status, ots::SolveStatus::optimal);
    EXPECT_NEAR(frozen.objective, 30 * 10 + 30 * 50, 1e-6);
    for (int kappa : ots::default_contingencies(net).branch_ids)
        for (const auto& b : net.buses) {
            const auto id = std::to_string(b.id);
            EXPECT_NEAR(frozen.value("pg_" + id + "_k" + std::to_string(kappa)), frozen.value("pg_" + id), 1e-9);
        }
}

TEST(Contingencies, BridgeOutagesAreSkipped) {
    const auto net = ots::make_fixture("bridge2");
    const auto cont = ots::default_contingencies(net);
    for (int kappa : cont.branch_ids) EXPECT_LE(kappa, 3);
    const auto a = ots::assemble(ots::ModelVariant::N3, net, ots::config_from_flags(net), cont, ots::default_policy(net));
    EXPECT_FALSE(a.model.find("pg_1_k4").has_value());
    EXPECT_TRUE(a.model.find("pg_1_k1").has_value());
}
