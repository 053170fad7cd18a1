// Command-line front end: experiment sweeps, summaries, bundled fixtures and oracle checks.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ots/ots.hpp"

namespace {

enum Exit { ok = 0, usage = 1, data = 2, cap = 3 };

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_run(const std::string& case_path, const std::string& variants, const std::string& alphas, int samples,
            std::uint64_t seed, const std::string& out_path, double time_cap, long node_cap, double big_m, int pivot,
            const std::string& export_dir, const std::string& strategy, int max_nis, int threads) {
    ots::ExperimentSpec spec;
    spec.network = ots::load_case(case_path);
    spec.case_name = spec.network.name.empty() ? case_path : spec.network.name;
    for (const auto& v : split(variants)) spec.variants.push_back(ots::parse_variant(v));
    for (const auto& a : split(alphas)) {
        try {
            spec.alphas.push_back(std::stod(a));
        } catch (const std::exception&) {
            throw ots::ModelError("bad alpha '" + a + "'");
        }
    }
    spec.samples = samples;
    spec.seed = seed;
    if (time_cap > 0) spec.solver.time_cap = time_cap;
    spec.solver.node_cap = node_cap;
    if (big_m > 0) spec.big_m = big_m;
    spec.assemble.pivot = pivot;
    spec.assemble.search.strategy = strategy == "seeded" ? ots::NisStrategy::seeded : ots::NisStrategy::exhaustive;
    spec.assemble.search.max_nodes = max_nis;
    if (!export_dir.empty()) {
        std::filesystem::create_directories(export_dir);
        spec.export_lp_dir = export_dir;
    }
    spec.threads = threads;

    const auto records = ots::run_experiment(spec);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ots::Error("cannot open " + out_path);
    ots::write_csv(out, records);
    out.close();

    int capped = 0, errors = 0;
    for (const auto& r : records) {
        capped += r.status == "CapHit";
        errors += r.status == "Error";
    }
    std::cerr << records.size() << " runs written to " << out_path;
    if (capped) std::cerr << ", " << capped << " hit a solver cap";
    if (errors) std::cerr << ", " << errors << " failed";
    std::cerr << '\n';
    return capped ? cap : ok;
}

int cmd_summarize(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ots::Error("cannot open " + path);
    const auto rows = ots::summarize(in);
    if (!rows.empty()) std::cout << ots::format_summary(rows);
    return ok;
}

int cmd_fixture(const std::string& name, const std::string& out) {
    ots::save_case(ots::make_fixture(name), out);
    return ok;
}

int cmd_verify(const std::string& case_path, bool exhaustive, int pivot, double big_m, long samples,
               std::uint64_t seed) {
    const auto net = ots::load_case(case_path);
    const auto g = ots::to_multigraph(net);
    if (g.n < 2) {
        std::cout << "single-bus case: nothing to verify\n";
        return ok;
    }
    const double M = big_m > 0 ? big_m : ots::default_m(g.n);
    const auto rep = ots::connectivity_sweep(g, pivot, M, exhaustive, samples, seed);
    std::cout << "topologies " << rep.topologies << " connected " << rep.connected << " block_mismatches "
              << rep.block_mismatches << " laplacian_mismatches " << rep.lemma_mismatches << '\n';
    for (const auto& z : rep.examples) {
        std::cout << "  mismatch z=";
        for (auto v : z) std::cout << int(v);
        std::cout << '\n';
    }

    const auto cfg = ots::config_from_flags(net);
    const auto plan = ots::plan_reduction(net, cfg);
    std::cout << plan.audit_log();
    const auto eq = ots::equivalence_check(net, cfg, plan, 200, seed);
    std::cout << "reduction: sampled " << eq.attempts << " feasible " << eq.feasible << " mismatches "
              << eq.mismatches.size() << '\n';
    return rep.ok() && eq.ok() ? ok : data;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal transmission switching with exact connectedness constraints"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "solve model variants over sampled switchable sets, write CSV");
    std::string case_path, variants = "M1,M2,M3,M4", alphas = "0.3,0.4,0.5,0.6,0.7", out_path, export_dir;
    std::string strategy = "exhaustive";
    int samples = 100, pivot = 1, max_nis = 10, threads = 1;
    std::uint64_t seed = 0;
    double time_cap = 0, big_m = 0;
    long node_cap = 1'000'000;
    run->add_option("--case", case_path, "case JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--variants", variants, "comma list of M1..M4, N1..N4");
    run->add_option("--alphas", alphas, "comma list of switchable fractions in (0,1]");
    run->add_option("--samples", samples, "switchable configurations per alpha")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "base seed");
    run->add_option("--out", out_path, "output CSV")->required();
    run->add_option("--solver-time-cap", time_cap, "seconds per solve");
    run->add_option("--node-cap", node_cap, "branch-and-bound nodes per solve")->check(CLI::PositiveNumber);
    run->add_option("--big-m", big_m, "override M of the connectedness block")->check(CLI::PositiveNumber);
    run->add_option("--pivot", pivot, "bus carrying the 1-n injection")->check(CLI::PositiveNumber);
    run->add_option("--export-lp", export_dir, "write every model as an LP file into DIR");
    run->add_option("--strategy", strategy, "unbalanced-set search")->check(CLI::IsMember({"exhaustive", "seeded"}));
    run->add_option("--max-nis-nodes", max_nis, "largest candidate set for the search")->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto* summ = app.add_subcommand("summarize", "per variant and alpha summary of a results CSV");
    std::string csv_path;
    summ->add_option("csv", csv_path, "results CSV")->required();

    auto* fix = app.add_subcommand("fixture", "write a bundled case");
    std::string fixture_name, fixture_out;
    fix->add_option("name", fixture_name, "fig1, cycle3, bridge2 or nis-demo")->required();
    fix->add_option("--out", fixture_out, "output path")->required();

    auto* ver = app.add_subcommand("verify", "check the connectedness block against union-find");
    std::string verify_case;
    bool exhaustive = false;
    long verify_samples = 256;
    ver->add_option("--case", verify_case, "case JSON file")->required()->check(CLI::ExistingFile);
    ver->add_flag("--exhaustive", exhaustive, "sweep all 2^|E| topologies");
    ver->add_option("--samples", verify_samples, "random topologies when not exhaustive");
    ver->add_option("--pivot", pivot, "bus carrying the 1-n injection");
    ver->add_option("--big-m", big_m, "override M");
    ver->add_option("--seed", seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*run)
            return cmd_run(case_path, variants, alphas, samples, seed, out_path, time_cap, node_cap, big_m, pivot,
                           export_dir, strategy, max_nis, threads);
        if (*summ) return cmd_summarize(csv_path);
        if (*fix) return cmd_fixture(fixture_name, fixture_out);
        if (*ver) return cmd_verify(verify_case, exhaustive, pivot, big_m, verify_samples, seed);
    } catch (const ots::ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return data;
    }
    return usage;
}
