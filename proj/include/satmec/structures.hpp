#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satmec/core.hpp"
#include "satmec/error.hpp"
#include "satmec/geometry.hpp"

namespace satmec {

enum class StructureKind { ComputingInForwardLink, ComputingOnOrbit, ComputingAfterFeederLink };

inline constexpr std::string_view to_string(StructureKind k) {
    switch (k) {
    case StructureKind::ComputingInForwardLink: return "computing-in-forward-link";
    case StructureKind::ComputingOnOrbit: return "computing-on-orbit";
    case StructureKind::ComputingAfterFeederLink: return "computing-after-feeder-link";
    }
    return "?";
}

inline std::optional<StructureKind> parse_structure_kind(std::string_view s) {
    for (auto k : {StructureKind::ComputingInForwardLink, StructureKind::ComputingOnOrbit,
                   StructureKind::ComputingAfterFeederLink})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

/// Parameters of one minimal integrating structure. The tier named by `kind`
/// must carry a server; other tiers get one only when their server is set.
struct StructureSpec {
    StructureKind kind = StructureKind::ComputingOnOrbit;
    std::string id_prefix;

    std::size_t n_aps = 0;
    std::size_t n_satellites = 1;
    std::size_t n_gateways = 1;
    std::size_t n_mtds = 1;

    std::optional<MecServer> ap_server;
    std::optional<MecServer> satellite_server;
    std::optional<MecServer> gateway_server;
    MecServer cloud_server{1e12, 0.0, 0.0, 1.0, false};

    std::map<LinkKind, double> bandwidth{{LinkKind::UserAccess, 20e6},    {LinkKind::AccessSatellite, 50e6},
                                         {LinkKind::UserSatellite, 5e6},  {LinkKind::Feeder, 200e6},
                                         {LinkKind::Isl, 100e6},          {LinkKind::Fiber, 10e9}};
    double noise_psd = 4e-21; // W/Hz, about -174 dBm/Hz

    double mtd_max_power = 0.2;   // W
    double mtd_energy_budget = 10; // J
    double relay_power = 10.0;     // W for AP, satellite and gateway forwarding

    double area_radius = 5'000.0; // MTDs sit on a circle of this radius
    double ap_altitude = 200.0;
    OrbitDescriptor satellite_orbit{OrbitKind::Geo, 600e3, {}, 1.0, 0.0, 0.0, 0.0, 1'000e3};
    double satellite_spacing = 500e3; // along x between consecutive satellites
    Position gateway_origin{200e3, 0.0, 0.0};
    double gateway_spacing = 100e3;

    double cloud_fiber_delay = 0.02;
    bool fiber_interconnect = false;
    double gateway_fiber_delay = 0.001;
    bool direct_satellite_access = false; // adds MTD->satellite links to the forward-link structure
};

inline Topology build_structure(const StructureSpec& spec) {
    const auto& p = spec.id_prefix;
    const bool forward = spec.kind == StructureKind::ComputingInForwardLink;
    if (spec.n_mtds == 0 || spec.n_satellites == 0 || spec.n_gateways == 0)
        throw Error("build_structure: every structure needs MTDs, a satellite and a gateway");
    if (forward && (spec.n_aps == 0 || !spec.ap_server))
        throw Error("build_structure: computing-in-forward-link needs at least one AP with a server");
    if (spec.kind == StructureKind::ComputingOnOrbit && !spec.satellite_server)
        throw Error("build_structure: computing-on-orbit needs a satellite server");
    if (spec.kind == StructureKind::ComputingAfterFeederLink && !spec.gateway_server)
        throw Error("build_structure: computing-after-feeder-link needs a gateway server");

    auto bw = [&](LinkKind k) {
        auto it = spec.bandwidth.find(k);
        if (it == spec.bandwidth.end()) throw Error("build_structure: no bandwidth for " + std::string(to_string(k)));
        return it->second;
    };
    auto id = [&](std::string_view stem, std::size_t i) { return p + std::string(stem) + std::to_string(i); };

    Topology t;
    t.structure_tags.emplace_back(to_string(spec.kind));
    auto circle = [](std::size_t i, std::size_t n, double r, double z) {
        if (n == 1) return Position{0.0, 0.0, z};
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        return Position{r * std::cos(a), r * std::sin(a), z};
    };

    for (std::size_t i = 0; i < spec.n_mtds; ++i) {
        Node n = make_node(id("mtd", i), NodeKind::Mtd, circle(i, spec.n_mtds, spec.area_radius, 0.0));
        n.max_tx_power = spec.mtd_max_power;
        n.energy_budget = spec.mtd_energy_budget;
        t.nodes.push_back(n);
    }
    const std::size_t n_aps = forward ? spec.n_aps : 0;
    for (std::size_t j = 0; j < n_aps; ++j) {
        Node n = make_node(id("ap", j), NodeKind::AccessPlatform, circle(j, n_aps, spec.area_radius / 2.0, spec.ap_altitude));
        n.server = spec.ap_server;
        n.relay_power = spec.relay_power;
        t.nodes.push_back(n);
    }
    for (std::size_t s = 0; s < spec.n_satellites; ++s) {
        Node n = make_node(id("sat", s), NodeKind::Satellite, {});
        OrbitDescriptor o = spec.satellite_orbit;
        o.anchor.x += static_cast<double>(s) * spec.satellite_spacing;
        n.orbit = o;
        n.position = {o.anchor.x, o.anchor.y, o.altitude};
        n.server = spec.satellite_server;
        n.relay_power = spec.relay_power;
        t.nodes.push_back(n);
    }
    for (std::size_t g = 0; g < spec.n_gateways; ++g) {
        Node n = make_node(id("gw", g), NodeKind::Gateway,
                           {spec.gateway_origin.x + static_cast<double>(g) * spec.gateway_spacing, spec.gateway_origin.y, 0.0});
        n.server = spec.gateway_server;
        n.relay_power = spec.relay_power;
        t.nodes.push_back(n);
    }
    Node cloud = make_node(p + "cloud", NodeKind::Cloud, spec.gateway_origin);
    cloud.server = spec.cloud_server;
    t.nodes.push_back(cloud);

    auto link = [&](std::string src, std::string dst, LinkKind k, std::optional<double> delay = std::nullopt) {
        t.links.push_back({std::move(src), std::move(dst), k, bw(k), spec.noise_psd, 1.0, delay, 0.0});
    };
    const auto S = spec.n_satellites;
    for (std::size_t i = 0; i < spec.n_mtds; ++i) {
        for (std::size_t j = 0; j < n_aps; ++j) link(id("mtd", i), id("ap", j), LinkKind::UserAccess);
        if (!forward || spec.direct_satellite_access) link(id("mtd", i), id("sat", i % S), LinkKind::UserSatellite);
    }
    for (std::size_t j = 0; j < n_aps; ++j) link(id("ap", j), id("sat", j % S), LinkKind::AccessSatellite);
    if (S >= 2) {
        const std::size_t edges = S >= 3 ? S : 1;
        for (std::size_t s = 0; s < edges; ++s) {
            link(id("sat", s), id("sat", (s + 1) % S), LinkKind::Isl);
            link(id("sat", (s + 1) % S), id("sat", s), LinkKind::Isl);
        }
    }
    for (std::size_t g = 0; g < spec.n_gateways; ++g) link(id("sat", g % S), id("gw", g), LinkKind::Feeder);
    for (std::size_t g = 0; g < spec.n_gateways; ++g) link(id("gw", g), p + "cloud", LinkKind::Fiber, spec.cloud_fiber_delay);
    if (spec.fiber_interconnect) {
        for (std::size_t g = 0; g + 1 < spec.n_gateways; ++g) {
            link(id("gw", g), id("gw", g + 1), LinkKind::Fiber, spec.gateway_fiber_delay);
            link(id("gw", g + 1), id("gw", g), LinkKind::Fiber, spec.gateway_fiber_delay);
        }
    }
    return t;
}

/// Union of the parts. Ids listed in `shared` must be defined identically in
/// every part that has them and are merged once; any other repeated id is a
/// conflict. Identical links are kept once.
inline Topology compose(const std::vector<Topology>& parts, const std::vector<NodeId>& shared = {}) {
    auto is_shared = [&](const NodeId& id) { return std::find(shared.begin(), shared.end(), id) != shared.end(); };
    for (const auto& id : shared) {
        const auto holders = std::count_if(parts.begin(), parts.end(), [&](const Topology& t) { return t.find(id) != nullptr; });
        if (holders < 2 && parts.size() > 1) throw Error("compose: shared id '" + id + "' is not in two parts");
    }

    Topology out;
    for (const auto& part : parts) {
        for (const auto& n : part.nodes) {
            if (const auto* existing = out.find(n.id)) {
                if (!is_shared(n.id)) throw Error("compose: id '" + n.id + "' collides but is not shared");
                if (!(*existing == n)) throw Error("compose: conflicting definitions for shared id '" + n.id + "'");
                continue;
            }
            out.nodes.push_back(n);
        }
        for (const auto& l : part.links) {
            auto same_ends = std::find_if(out.links.begin(), out.links.end(), [&](const Link& o) {
                return o.src == l.src && o.dst == l.dst && o.kind == l.kind;
            });
            if (same_ends == out.links.end()) {
                out.links.push_back(l);
            } else if (!(*same_ends == l)) {
                throw Error("compose: conflicting definitions for " + describe(l));
            }
        }
        for (const auto& tag : part.structure_tags)
            if (std::find(out.structure_tags.begin(), out.structure_tags.end(), tag) == out.structure_tags.end())
                out.structure_tags.push_back(tag);
    }
    return out;
}

// ---------------------------------------------------------------------------
// On-orbit server placement over a ring constellation

struct PlacementProblem {
    std::size_t n_satellites = 1;
    std::vector<double> demand; // served MTDs per satellite
    double hardening_cost = 0.0;
    double isl_cost = 0.0; // per relay hop per unit demand
    std::size_t hop_budget = 0;
};

inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

inline void check_problem(const PlacementProblem& p) {
    if (p.n_satellites == 0) throw Error("placement: need at least one satellite");
    if (p.demand.size() != p.n_satellites) throw Error("placement: demand must list every satellite");
    if (!(p.hardening_cost >= 0.0) || !(p.isl_cost >= 0.0)) throw Error("placement: costs must be nonnegative");
    for (double d : p.demand)
        if (!(d >= 0.0)) throw Error("placement: demand must be nonnegative");
}

inline std::size_t ring_hops(std::size_t i, std::size_t j, std::size_t n) {
    const std::size_t d = i > j ? i - j : j - i;
    return std::min(d, n - d);
}

/// Hardening plus relaying cost; kInfeasibleCost when some satellite is
/// farther than the hop budget from every server (or the subset is empty).
inline double placement_cost(const PlacementProblem& p, const std::vector<std::size_t>& servers) {
    check_problem(p);
    if (servers.empty()) return kInfeasibleCost;
    for (auto s : servers)
        if (s >= p.n_satellites) throw Error("placement: server index out of range");
    double relay = 0.0;
    for (std::size_t i = 0; i < p.n_satellites; ++i) {
        std::size_t best = p.n_satellites;
        for (auto s : servers) best = std::min(best, ring_hops(i, s, p.n_satellites));
        if (best > p.hop_budget) return kInfeasibleCost;
        relay += p.demand[i] * static_cast<double>(best);
    }
    return p.hardening_cost * static_cast<double>(servers.size()) + p.isl_cost * relay;
}

enum class PlacementMethod { Exhaustive, Greedy };

inline constexpr std::string_view to_string(PlacementMethod m) {
    return m == PlacementMethod::Exhaustive ? "exhaustive" : "greedy";
}

struct PlacementResult {
    std::vector<std::size_t> servers; // ascending satellite indices
    double cost = kInfeasibleCost;
    PlacementMethod method = PlacementMethod::Exhaustive;
};

namespace detail {

inline bool cost_less(double a, double b) {
    if (std::isinf(b)) return !std::isinf(a);
    return a < b - 1e-12 * std::max(1.0, std::abs(b));
}

inline bool cost_tie(double a, double b) { return !cost_less(a, b) && !cost_less(b, a); }

} // namespace detail

inline constexpr std::size_t kMaxExhaustiveSatellites = 20;

/// Exhaustive: global minimizer, ties broken by the lexicographically
/// smallest index list. Greedy: start with every satellite hardened and keep
/// removing the server whose removal lowers the cost most (lowest index on
/// ties) until no removal helps.
inline PlacementResult optimize_placement(const PlacementProblem& p, PlacementMethod method) {
    check_problem(p);
    const std::size_t n = p.n_satellites;
    PlacementResult best;
    best.method = method;

    if (method == PlacementMethod::Exhaustive) {
        if (n > kMaxExhaustiveSatellites) throw Error("placement: exhaustive search limited to 20 satellites");
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<std::size_t> subset;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) subset.push_back(i);
            const double c = placement_cost(p, subset);
            if (detail::cost_less(c, best.cost) ||
                (!std::isinf(c) && detail::cost_tie(c, best.cost) && subset < best.servers)) {
                best.cost = c;
                best.servers = std::move(subset);
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) best.servers.push_back(i);
        best.cost = placement_cost(p, best.servers);
        while (best.servers.size() > 1) {
            std::optional<std::size_t> drop;
            double drop_cost = best.cost;
            for (std::size_t k = 0; k < best.servers.size(); ++k) {
                auto trial = best.servers;
                trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
                const double c = placement_cost(p, trial);
                if (detail::cost_less(c, drop_cost)) {
                    drop_cost = c;
                    drop = k;
                }
            }
            if (!drop) break;
            best.servers.erase(best.servers.begin() + static_cast<std::ptrdiff_t>(*drop));
            best.cost = drop_cost;
        }
    }
    if (std::isinf(best.cost)) throw InfeasibleError("placement: no server subset meets the hop budget");
    return best;
}

} // namespace satmec
