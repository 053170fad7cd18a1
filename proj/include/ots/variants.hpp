#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ots/constraints.hpp"
#include "ots/error.hpp"
#include "ots/grid_model.hpp"
#include "ots/milp_model.hpp"
#include "ots/reduction.hpp"

namespace ots {

// M1 base, M2 +degree rows, M3 +connectedness block, M4 +reduced block; N* add N-1 security.
enum class ModelVariant { M1, M2, M3, M4, N1, N2, N3, N4 };

inline const char* to_string(ModelVariant v) {
    static const char* names[] = {"M1", "M2", "M3", "M4", "N1", "N2", "N3", "N4"};
    return names[static_cast<int>(v)];
}

inline ModelVariant parse_variant(const std::string& s) {
    for (int i = 0; i < 8; ++i)
        if (s == to_string(static_cast<ModelVariant>(i))) return static_cast<ModelVariant>(i);
    throw ModelError("unknown model variant '" + s + "'");
}

inline bool is_security_variant(ModelVariant v) { return static_cast<int>(v) >= 4; }

// 1..4 for M1..M4 and N1..N4
inline int variant_level(ModelVariant v) { return static_cast<int>(v) % 4 + 1; }

struct AssembleOptions {
    int pivot = 1;
    NisSearch search;
};

struct AssembledModel {
    MilpModel model;
    int connectedness_rows = 0; // rows of all (full or reduced) connectedness blocks
    int connectedness_vars = 0; // continuous variables of those blocks
    std::optional<ReductionPlan> plan;            // M4/N4 base plan
    std::vector<ReductionPlan> contingency_plans; // N4, one per contingency in order
};

inline SwitchConfig with_switchable(SwitchConfig cfg, int branch_id) {
    const auto it = std::lower_bound(cfg.switchable_ids.begin(), cfg.switchable_ids.end(), branch_id);
    if (it == cfg.switchable_ids.end() || *it != branch_id) cfg.switchable_ids.insert(it, branch_id);
    return cfg;
}

inline ReductionPlan plan_reduction(const Network& net, const SwitchConfig& config, const NisSearch& search = {}) {
    return contract(net, config, find_unbalanced_nis(net, config, search));
}

inline AssembledModel assemble(ModelVariant variant, const Network& net, const SwitchConfig& config,
                               const ContingencySet& contingencies, const BigMPolicy& policy,
                               const AssembleOptions& opts = {}) {
    if (opts.pivot < 1 || opts.pivot > net.bus_count()) throw ModelError("pivot bus out of range");
    AssembledModel out;
    out.model = build_base_ots(net, config, policy);
    const int level = variant_level(variant);
    const bool secure = is_security_variant(variant);
    const Multigraph g = to_multigraph(net);
    auto census = [&](auto&& emit) {
        const int rows = out.model.row_count(), vars = out.model.variable_count();
        emit();
        out.connectedness_rows += out.model.row_count() - rows;
        out.connectedness_vars += out.model.variable_count() - vars;
    };

    if (level == 2) add_necessary_connectedness(out.model, net);
    if (level == 3 && net.bus_count() >= 2)
        census([&] { add_connectedness(out.model, g, make_uniquely_balanced_c(g.n, opts.pivot), policy.M); });
    if (level == 4) {
        out.plan = plan_reduction(net, config, opts.search);
        census([&] { reduced_connectedness(out.model, *out.plan, opts.pivot, policy.M); });
    }
    if (!secure) return out;

    add_n_minus_1(out.model, net, contingencies, policy);
    if (level == 3 && net.bus_count() >= 2)
        census([&] {
            add_contingency_connectedness(out.model, g, contingencies, make_uniquely_balanced_c(g.n, opts.pivot),
                                          policy.M);
        });
    if (level == 4)
        for (int kappa : contingencies.branch_ids) {
            out.contingency_plans.push_back(plan_reduction(net, with_switchable(config, kappa), opts.search));
            census([&] {
                reduced_connectedness(out.model, out.contingency_plans.back(), opts.pivot, policy.M, kappa);
            });
        }
    return out;
}

} // namespace ots
