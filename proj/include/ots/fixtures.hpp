#pragma once

#include <string>
#include <vector>

#include "ots/error.hpp"
#include "ots/grid_model.hpp"

namespace ots {

inline std::vector<std::string> fixture_names() { return {"fig1", "cycle3", "bridge2", "nis-demo"}; }

namespace detail {

inline Bus bus(int id, double p_d, double g_min, double g_max, double c_g, double ramp = 50) {
    return {id, p_d, g_min, g_max, c_g, -1.0, 1.0, ramp, ramp};
}

inline Branch line(int id, int from, int to, double cap, bool sw = false, double c_b = 0, double b = 100) {
    return {id, from, to, b, cap, sw, c_b};
}

} // namespace detail

/// Bundled synthetic cases.
///  fig1:     two triangle areas (1-2-3, 4-5-6) joined by the cutset 3-4, 2-5, each area able
///            to serve its own load; the cutset branches are switchable and cost 5 while on.
///  cycle3:   cheap generator at bus 1 feeding a load at bus 3 over a cycle whose 1-2-3 path is
///            weak; an expensive local generator at bus 3 covers the outage of 1-3.
///  bridge2:  triangle 1-2-3 with a radial spur 3-4-5 of two bridges.
///  nis-demo: generator triangle 1-2-3 plus a five-bus load pocket 4..8; buses 3..8 form an
///            unbalanced region whose boundary {3,5} is joined by fixed branches 3-4, 4-5.
inline Network make_fixture(const std::string& name) {
    using detail::bus;
    using detail::line;
    Network net;
    net.name = name;
    if (name == "fig1") {
        net.buses = {bus(1, 0, 0, 100, 10), bus(2, 20, 0, 0, 0), bus(3, 20, 0, 0, 0),
                     bus(4, 0, 0, 100, 10), bus(5, 20, 0, 0, 0), bus(6, 20, 0, 0, 0)};
        net.branches = {line(1, 1, 2, 100), line(2, 2, 3, 100), line(3, 1, 3, 100),       line(4, 4, 5, 100),
                        line(5, 5, 6, 100), line(6, 4, 6, 100), line(7, 3, 4, 100, true, 5), line(8, 2, 5, 100, true, 5)};
    } else if (name == "cycle3") {
        net.buses = {bus(1, 0, 0, 100, 10, 10), bus(2, 0, 0, 0, 0, 10), bus(3, 60, 0, 100, 50, 10)};
        net.branches = {line(1, 1, 2, 30), line(2, 2, 3, 30), line(3, 1, 3, 100)};
    } else if (name == "bridge2") {
        net.buses = {bus(1, 0, 0, 100, 10), bus(2, 0, 0, 100, 20), bus(3, 10, 0, 0, 0), bus(4, 20, 0, 0, 0),
                     bus(5, 20, 0, 0, 0)};
        net.branches = {line(1, 1, 2, 100, true, 1), line(2, 2, 3, 100, true, 1), line(3, 1, 3, 100, true, 1),
                        line(4, 3, 4, 100), line(5, 4, 5, 100)};
    } else if (name == "nis-demo") {
        net.buses = {bus(1, 0, 0, 200, 10), bus(2, 0, 0, 100, 20), bus(3, 10, 0, 0, 0), bus(4, 10, 0, 0, 0),
                     bus(5, 10, 0, 0, 0),   bus(6, 10, 0, 0, 0),    bus(7, 10, 0, 0, 0), bus(8, 10, 0, 0, 0)};
        net.branches = {line(1, 1, 2, 100),          line(2, 2, 3, 100, true, 1), line(3, 1, 3, 100, true, 1),
                        line(4, 3, 4, 100),          line(5, 4, 5, 100),          line(6, 5, 6, 100),
                        line(7, 6, 7, 100),          line(8, 7, 8, 100),          line(9, 4, 6, 100),
                        line(10, 5, 7, 100, true, 1), line(11, 6, 8, 100, true, 1), line(12, 2, 5, 100, true, 1)};
    } else {
        throw ModelError("unknown fixture '" + name + "' (expected fig1, cycle3, bridge2 or nis-demo)");
    }
    validate(net);
    return net;
}

} // namespace ots
