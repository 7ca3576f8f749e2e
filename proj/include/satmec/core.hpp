#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "satmec/error.hpp"
#include "satmec/geometry.hpp"

namespace satmec {

using NodeId = std::string;

enum class NodeKind { Mtd, AccessPlatform, Satellite, Gateway, Cloud };
enum class LinkKind { UserAccess, AccessSatellite, UserSatellite, Feeder, Isl, Fiber };

inline constexpr std::string_view to_string(NodeKind k) {
    switch (k) {
    case NodeKind::Mtd: return "mtd";
    case NodeKind::AccessPlatform: return "access-platform";
    case NodeKind::Satellite: return "satellite";
    case NodeKind::Gateway: return "gateway";
    case NodeKind::Cloud: return "cloud";
    }
    return "?";
}

inline constexpr std::string_view to_string(LinkKind k) {
    switch (k) {
    case LinkKind::UserAccess: return "user-access";
    case LinkKind::AccessSatellite: return "access-satellite";
    case LinkKind::UserSatellite: return "user-satellite";
    case LinkKind::Feeder: return "feeder";
    case LinkKind::Isl: return "isl";
    case LinkKind::Fiber: return "fiber";
    }
    return "?";
}

inline std::optional<NodeKind> parse_node_kind(std::string_view s) {
    for (auto k : {NodeKind::Mtd, NodeKind::AccessPlatform, NodeKind::Satellite, NodeKind::Gateway, NodeKind::Cloud})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

inline std::optional<LinkKind> parse_link_kind(std::string_view s) {
    for (auto k : {LinkKind::UserAccess, LinkKind::AccessSatellite, LinkKind::UserSatellite, LinkKind::Feeder,
                   LinkKind::Isl, LinkKind::Fiber})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

struct MecServer {
    double capacity = 0.0;     // CPU cycles per second
    double active_power = 0.0; // W
    double idle_power = 0.0;   // W
    double activation = 1.0;   // 0 means switched off
    bool hardened = false;

    friend bool operator==(const MecServer&, const MecServer&) = default;
};

struct Node {
    NodeId id;
    NodeKind kind = NodeKind::Mtd;
    Position position{};
    std::optional<OrbitDescriptor> orbit; // satellites only; overrides position
    std::optional<MecServer> server;
    double max_tx_power = 0.0;  // MTD only, W
    double energy_budget = 0.0; // MTD only, J
    double relay_power = 0.0;   // transmit power used when forwarding, W

    friend bool operator==(const Node&, const Node&) = default;
};

inline Node make_node(NodeId id, NodeKind kind, Position position) {
    Node n;
    n.id = std::move(id);
    n.kind = kind;
    n.position = position;
    return n;
}

/// Directed in the offloading (uplink) direction.
struct Link {
    NodeId src;
    NodeId dst;
    LinkKind kind = LinkKind::UserAccess;
    double bandwidth = 0.0; // Hz
    double noise_psd = 0.0; // W/Hz
    double activation = 1.0;
    std::optional<double> fixed_prop_delay; // s, overrides geometry
    double active_power = 0.0;              // W drawn while the link is on

    friend bool operator==(const Link&, const Link&) = default;
};

struct Task {
    double data_size = 0.0; // bits
    double cycles = 0.0;    // CPU cycles
    NodeId owner;

    friend bool operator==(const Task&, const Task&) = default;
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<std::string> structure_tags;

    const Node* find(std::string_view id) const {
        auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
        return it == nodes.end() ? nullptr : &*it;
    }

    Node* find(std::string_view id) {
        auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
        return it == nodes.end() ? nullptr : &*it;
    }

    const Node& at(std::string_view id) const {
        if (const auto* n = find(id)) return *n;
        throw Error("unknown node id '" + std::string(id) + "'");
    }

    friend bool operator==(const Topology&, const Topology&) = default;
};

inline Position node_position(const Node& n, double t) {
    return n.orbit ? satellite_position(*n.orbit, t) : n.position;
}

inline std::string describe(const Link& l) { return "link " + l.src + "->" + l.dst; }

enum class ActivationPolicy { IncludeDeactivated, ExcludeDeactivated };

/// A simple path from an MTD to a server-bearing node, as link indices.
struct Route {
    NodeId server;
    std::vector<std::size_t> links;

    friend bool operator==(const Route&, const Route&) = default;
};

/// All simple routes from `mtd` to nodes with a server, fewest hops first;
/// equal-length routes keep link-declaration order. Routes may pass through
/// server nodes.
inline std::vector<Route> reachable_servers(const Topology& t, std::string_view mtd,
                                            ActivationPolicy policy = ActivationPolicy::IncludeDeactivated,
                                            std::size_t max_hops = 8) {
    if (!t.find(mtd)) throw Error("unknown node id '" + std::string(mtd) + "'");
    const bool exclude = policy == ActivationPolicy::ExcludeDeactivated;

    std::vector<Route> out;
    std::vector<std::size_t> path;
    std::set<std::string_view> visited{mtd};

    std::function<void(std::string_view)> dfs = [&](std::string_view at) {
        if (path.size() >= max_hops) return;
        for (std::size_t i = 0; i < t.links.size(); ++i) {
            const auto& l = t.links[i];
            if (l.src != at || visited.contains(l.dst)) continue;
            if (exclude && !(l.activation > 0.0)) continue;
            const Node* next = t.find(l.dst);
            if (!next) continue;
            path.push_back(i);
            visited.insert(next->id);
            if (next->server && (!exclude || next->server->activation > 0.0)) out.push_back({next->id, path});
            dfs(next->id);
            visited.erase(next->id);
            path.pop_back();
        }
    };
    dfs(mtd);

    std::stable_sort(out.begin(), out.end(),
                     [](const Route& a, const Route& b) { return a.links.size() < b.links.size(); });
    return out;
}

/// First (shortest) route to each distinct server, in reachable order.
inline std::vector<Route> shortest_route_per_server(const std::vector<Route>& routes) {
    std::vector<Route> out;
    for (const auto& r : routes) {
        if (std::none_of(out.begin(), out.end(), [&](const Route& o) { return o.server == r.server; }))
            out.push_back(r);
    }
    return out;
}

namespace detail {

inline bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

} // namespace detail

/// Every invariant violation as a readable line; empty means valid.
inline std::vector<std::string> validate_topology(const Topology& t) {
    std::vector<std::string> v;
    std::set<std::string_view> ids;
    for (const auto& n : t.nodes) {
        const std::string who = std::string(to_string(n.kind)) + " '" + n.id + "'";
        if (n.id.empty()) v.emplace_back("empty node id");
        if (!ids.insert(n.id).second) v.push_back("duplicate node id '" + n.id + "'");
        if (!is_valid(n.position)) v.push_back("invalid position for " + who);
        if (n.orbit) {
            if (n.kind != NodeKind::Satellite) v.push_back("orbit on non-satellite " + who);
            for (const auto& m : orbit_violations(*n.orbit)) v.push_back(m + " for " + who);
        }
        if (n.server) {
            const auto& s = *n.server;
            if (!(s.capacity > 0.0)) v.push_back("nonpositive server capacity on " + who);
            if (!detail::in_unit_interval(s.activation)) v.push_back("server activation outside [0,1] on " + who);
            if (!(s.idle_power >= 0.0) || !(s.idle_power <= s.active_power))
                v.push_back("server idle power not in [0, active power] on " + who);
        }
        if (n.kind == NodeKind::Mtd) {
            if (n.server) v.push_back("MTD with server " + who);
            if (!(n.max_tx_power > 0.0)) v.push_back("nonpositive max tx power on " + who);
            if (!(n.energy_budget > 0.0)) v.push_back("nonpositive energy budget on " + who);
        }
        if (n.kind == NodeKind::Cloud && !n.server) v.push_back("cloud without server " + who);
        if (!(n.relay_power >= 0.0)) v.push_back("negative relay power on " + who);
    }

    for (const auto& l : t.links) {
        const auto d = describe(l);
        if (!t.find(l.src) || !t.find(l.dst)) v.push_back("unknown endpoint on " + d);
        if (l.src == l.dst) v.push_back("self loop on " + d);
        if (!(l.bandwidth > 0.0)) v.push_back("nonpositive bandwidth on " + d);
        if (!(l.noise_psd > 0.0)) v.push_back("nonpositive noise psd on " + d);
        if (!detail::in_unit_interval(l.activation)) v.push_back("activation outside [0,1] on " + d);
        if (l.fixed_prop_delay && !(*l.fixed_prop_delay >= 0.0)) v.push_back("negative fixed delay on " + d);
        if (!(l.active_power >= 0.0)) v.push_back("negative link power on " + d);
    }

    for (const auto& n : t.nodes) {
        if (n.kind != NodeKind::Mtd) continue;
        if (reachable_servers(t, n.id).empty()) v.push_back("unreachable MTD '" + n.id + "'");
    }
    return v;
}

} // namespace satmec
