#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ots/error.hpp"
#include "ots/graph.hpp"
#include "ots/random.hpp"

namespace ots {

struct Bus {
    int id = 0;
    double p_d = 0;       // load, MW
    double p_g_min = 0;   // generation bounds, MW
    double p_g_max = 0;
    double c_g = 0;       // generation cost, $/MW
    double theta_min = 0; // angle bounds, rad
    double theta_max = 0;
    double r_up = 0;      // ramp limits, MW (post-contingency redispatch only)
    double r_down = 0;
};

struct Branch {
    int id = 0;
    int from = 0;
    int to = 0;
    double b = 0;       // susceptance
    double p_b_max = 0; // capacity, MW
    bool switchable = false;
    double c_b = 0;     // cost charged while the branch is in service
};

struct Network {
    std::string name;
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    int bus_count() const { return static_cast<int>(buses.size()); }
    int branch_count() const { return static_cast<int>(branches.size()); }
};

/// Set of switchable branch ids, plus how it was produced.
struct SwitchConfig {
    std::vector<int> switchable_ids; // sorted, unique
    double alpha = 1.0;
    std::uint64_t seed = 0;

    bool contains(int branch_id) const {
        return std::binary_search(switchable_ids.begin(), switchable_ids.end(), branch_id);
    }
};

struct ContingencySet {
    std::vector<int> branch_ids; // sorted, unique
};

inline Multigraph to_multigraph(const Network& net, bool susceptance_weights = false) {
    Multigraph g;
    g.n = net.bus_count();
    g.edges.reserve(net.branches.size());
    for (const auto& br : net.branches) {
        g.edges.push_back({br.from, br.to});
        if (susceptance_weights) g.weights.push_back(br.b);
    }
    return g;
}

/// Switch config taken from the `switchable` flags of the case itself.
inline SwitchConfig config_from_flags(const Network& net) {
    SwitchConfig cfg;
    for (const auto& br : net.branches)
        if (br.switchable) cfg.switchable_ids.push_back(br.id);
    cfg.alpha = net.branches.empty()
                    ? 1.0
                    : static_cast<double>(cfg.switchable_ids.size()) / net.branch_count();
    return cfg;
}

inline void validate(const Network& net) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    auto finite = [&](double v, const std::string& where) {
        if (!std::isfinite(v)) fail(where + ": value must be finite");
    };
    if (net.buses.empty()) fail("buses: at least one bus is required");
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        const Bus& b = net.buses[i];
        const std::string at = "buses[" + std::to_string(i) + "]";
        if (b.id != static_cast<int>(i) + 1)
            fail(at + ".id: expected " + std::to_string(i + 1) + ", got " + std::to_string(b.id));
        finite(b.p_d, at + ".p_d");
        finite(b.p_g_min, at + ".p_g_min");
        finite(b.p_g_max, at + ".p_g_max");
        finite(b.c_g, at + ".c_g");
        finite(b.theta_min, at + ".theta_min");
        finite(b.theta_max, at + ".theta_max");
        finite(b.r_up, at + ".r_up");
        finite(b.r_down, at + ".r_down");
        if (b.p_g_min > b.p_g_max) fail(at + ".p_g_min: exceeds p_g_max");
        if (b.theta_min > b.theta_max) fail(at + ".theta_min: exceeds theta_max");
        if (b.r_up < 0) fail(at + ".r_up: must be non-negative");
        if (b.r_down < 0) fail(at + ".r_down: must be non-negative");
    }
    const int n = net.bus_count();
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const Branch& br = net.branches[k];
        const std::string at = "branches[" + std::to_string(k) + "]";
        if (br.id != static_cast<int>(k) + 1)
            fail(at + ".id: expected " + std::to_string(k + 1) + ", got " + std::to_string(br.id));
        if (br.from < 1 || br.from > n) fail(at + ".from: unknown bus " + std::to_string(br.from));
        if (br.to < 1 || br.to > n) fail(at + ".to: unknown bus " + std::to_string(br.to));
        if (br.from == br.to) fail(at + ".to: self-loop on bus " + std::to_string(br.from));
        finite(br.b, at + ".b");
        finite(br.p_b_max, at + ".p_b_max");
        finite(br.c_b, at + ".c_b");
        if (!(br.b > 0)) fail(at + ".b: must be positive");
        if (!(br.p_b_max > 0)) fail(at + ".p_b_max: must be positive");
        if (br.c_b < 0) fail(at + ".c_b: must be non-negative");
    }
    if (!is_connected(to_multigraph(net))) fail("branches: network graph is not connected");
}

namespace detail {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ParseError(where + ": unknown key \"" + it.key() + "\"");
    }
}

inline double get_real(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError(where + "." + key + ": missing");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(where + "." + key + ": must be finite");
    return d;
}

inline int get_int(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError(where + "." + key + ": missing");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

} // namespace detail

/// Parses and validates a case document (see README for the schema).
inline Network parse_case(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("case: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("case: top level must be an object");
    detail::check_keys(doc, {"version", "name", "buses", "branches"}, "case");
    if (detail::get_int(doc, "version", "case") != 1) throw ParseError("case.version: only version 1 is supported");
    if (!doc.contains("name") || !doc["name"].is_string()) throw ParseError("case.name: expected a string");
    if (!doc.contains("buses") || !doc["buses"].is_array()) throw ParseError("case.buses: expected an array");
    if (!doc.contains("branches") || !doc["branches"].is_array())
        throw ParseError("case.branches: expected an array");

    Network net;
    net.name = doc["name"].get<std::string>();
    for (std::size_t i = 0; i < doc["buses"].size(); ++i) {
        const auto& jb = doc["buses"][i];
        const std::string at = "buses[" + std::to_string(i) + "]";
        if (!jb.is_object()) throw ParseError(at + ": expected an object");
        detail::check_keys(jb, {"id", "p_d", "p_g_min", "p_g_max", "c_g", "theta_min", "theta_max", "r_up", "r_down"},
                           at);
        Bus b;
        b.id = detail::get_int(jb, "id", at);
        b.p_d = detail::get_real(jb, "p_d", at);
        b.p_g_min = detail::get_real(jb, "p_g_min", at);
        b.p_g_max = detail::get_real(jb, "p_g_max", at);
        b.c_g = detail::get_real(jb, "c_g", at);
        b.theta_min = detail::get_real(jb, "theta_min", at);
        b.theta_max = detail::get_real(jb, "theta_max", at);
        b.r_up = detail::get_real(jb, "r_up", at);
        b.r_down = detail::get_real(jb, "r_down", at);
        net.buses.push_back(b);
    }
    for (std::size_t k = 0; k < doc["branches"].size(); ++k) {
        const auto& jb = doc["branches"][k];
        const std::string at = "branches[" + std::to_string(k) + "]";
        if (!jb.is_object()) throw ParseError(at + ": expected an object");
        detail::check_keys(jb, {"id", "from", "to", "b", "p_b_max", "switchable", "c_b"}, at);
        Branch br;
        br.id = detail::get_int(jb, "id", at);
        br.from = detail::get_int(jb, "from", at);
        br.to = detail::get_int(jb, "to", at);
        br.b = detail::get_real(jb, "b", at);
        br.p_b_max = detail::get_real(jb, "p_b_max", at);
        if (!jb.contains("switchable") || !jb["switchable"].is_boolean())
            throw ParseError(at + ".switchable: expected a boolean");
        br.switchable = jb["switchable"].get<bool>();
        br.c_b = jb.contains("c_b") ? detail::get_real(jb, "c_b", at) : 0.0;
        net.branches.push_back(br);
    }
    validate(net);
    return net;
}

inline Network load_case(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("case: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

/// Canonical serialisation: schema key order, two-space indent, trailing newline.
inline std::string dump_case(const Network& net) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["name"] = net.name;
    doc["buses"] = nlohmann::ordered_json::array();
    for (const auto& b : net.buses) {
        nlohmann::ordered_json jb;
        jb["id"] = b.id;
        jb["p_d"] = b.p_d;
        jb["p_g_min"] = b.p_g_min;
        jb["p_g_max"] = b.p_g_max;
        jb["c_g"] = b.c_g;
        jb["theta_min"] = b.theta_min;
        jb["theta_max"] = b.theta_max;
        jb["r_up"] = b.r_up;
        jb["r_down"] = b.r_down;
        doc["buses"].push_back(std::move(jb));
    }
    doc["branches"] = nlohmann::ordered_json::array();
    for (const auto& br : net.branches) {
        nlohmann::ordered_json jb;
        jb["id"] = br.id;
        jb["from"] = br.from;
        jb["to"] = br.to;
        jb["b"] = br.b;
        jb["p_b_max"] = br.p_b_max;
        jb["switchable"] = br.switchable;
        jb["c_b"] = br.c_b;
        doc["branches"].push_back(std::move(jb));
    }
    return doc.dump(2) + "\n";
}

inline void save_case(const Network& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("case: cannot write " + path.string());
    out << dump_case(net);
    if (!out) throw Error("case: write failed for " + path.string());
}

/// Number of switchable lines for a given fraction: ceil(alpha * n_e), immune to
/// representation error such as 0.3 * 10 = 3.0000000000000004.
inline int switchable_count(double alpha, int n_e) {
    const double raw = alpha * n_e;
    const double rounded = std::round(raw);
    const int k = std::abs(raw - rounded) <= 1e-9 * std::max(1.0, raw) ? static_cast<int>(rounded)
                                                                         : static_cast<int>(std::ceil(raw));
    return std::clamp(k, 0, n_e);
}

/// Uniform sample of ceil(alpha * N_e) distinct branch ids (partial Fisher-Yates over mt19937_64).
inline SwitchConfig sample_switchable(const Network& net, double alpha, std::uint64_t seed) {
    if (!(alpha > 0 && alpha <= 1)) throw ModelError("sample_switchable: alpha must lie in (0, 1]");
    const int n_e = net.branch_count();
    const int k = switchable_count(alpha, n_e);
    std::vector<int> ids(static_cast<std::size_t>(n_e));
    std::iota(ids.begin(), ids.end(), 1);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n_e - i)));
        std::swap(ids[i], ids[j]);
    }
    SwitchConfig cfg;
    cfg.switchable_ids.assign(ids.begin(), ids.begin() + k);
    std::sort(cfg.switchable_ids.begin(), cfg.switchable_ids.end());
    cfg.alpha = alpha;
    cfg.seed = seed;
    return cfg;
}

/// Branches whose single outage leaves the network connected (non-bridges).
inline ContingencySet default_contingencies(const Network& net) {
    const Multigraph g = to_multigraph(net);
    ContingencySet out;
    Topology z(static_cast<std::size_t>(g.edge_count()), 1);
    for (int k = 0; k < g.edge_count(); ++k) {
        z[k] = 0;
        if (is_connected(g, z)) out.branch_ids.push_back(k + 1);
        z[k] = 1;
    }
    return out;
}

} // namespace ots
