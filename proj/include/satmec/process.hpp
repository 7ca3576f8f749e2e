#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "satmec/channel.hpp"
#include "satmec/core.hpp"
#include "satmec/error.hpp"
#include "satmec/latency.hpp"

namespace satmec {

/// Candidate offloading route of one MTD. Its per-segment hop channels live
/// in ProcessMtd::hops.
struct RouteOption {
    std::string server_id;
    std::size_t server = 0; // index into Process::servers
    LinkKind first_hop = LinkKind::UserAccess;
    std::vector<std::size_t> links; // topology link indices, when built from one
};

struct ProcessMtd {
    NodeId id;
    Task task;
    double energy_budget = 0.0;
    double max_power = 0.0;
    std::vector<RouteOption> routes;
    /// hops[segment][route][hop]; the first hop's power is the decision
    /// variable and its stored power is ignored.
    std::vector<std::vector<std::vector<HopInput>>> hops;
};

struct ServerProfile {
    NodeId id;
    double capacity = 0.0;
};

/// A medium-timescale period split into segments, seen through large-scale
/// channel gains only. Every MTD offloads one task per segment.
struct Process {
    std::vector<double> durations;
    std::vector<ProcessMtd> mtds;
    std::vector<ServerProfile> servers;

    std::size_t segments() const { return durations.size(); }
};

/// Predicted latency charged to a task that gets no transmit power.
inline constexpr double kZeroPowerLatency = 1e6;

inline void check_process(const Process& p) {
    if (p.durations.empty()) throw Error("process: need at least one segment");
    for (double d : p.durations)
        if (!(d > 0.0)) throw Error("process: segment durations must be positive");
    for (const auto& s : p.servers)
        if (!(s.capacity > 0.0)) throw Error("process: server '" + s.id + "' needs positive capacity");
    for (const auto& m : p.mtds) {
        const std::string who = "process: MTD '" + m.id + "'";
        if (!(m.energy_budget > 0.0)) throw Error(who + " needs a positive energy budget");
        if (!(m.max_power > 0.0)) throw Error(who + " needs a positive power cap");
        if (!(m.task.data_size > 0.0) || !(m.task.cycles > 0.0)) throw Error(who + " needs a positive task");
        if (m.routes.empty()) throw Error(who + " has no candidate route");
        if (m.hops.size() != p.segments()) throw Error(who + " needs hop channels for every segment");
        for (const auto& seg : m.hops) {
            if (seg.size() != m.routes.size()) throw Error(who + " needs hop channels for every route");
            for (const auto& hops : seg) {
                if (hops.empty()) throw Error(who + " has an empty route");
                for (const auto& h : hops)
                    if (!h.wired && !(h.gain > 0.0 && h.bandwidth > 0.0 && h.noise_psd > 0.0))
                        throw Error(who + " has a hop with nonpositive gain, bandwidth or noise");
            }
        }
        for (const auto& r : m.routes)
            if (r.server >= p.servers.size()) throw Error(who + " routes to an unknown server");
    }
}

/// Per MTD and segment: chosen route and first-hop transmit power.
struct Plan {
    std::vector<std::vector<std::size_t>> target; // [mtd][segment]
    std::vector<std::vector<double>> power;       // [mtd][segment], W

    friend bool operator==(const Plan&, const Plan&) = default;
};

inline Plan empty_plan(const Process& p) {
    Plan plan;
    plan.target.assign(p.mtds.size(), std::vector<std::size_t>(p.segments(), 0));
    plan.power.assign(p.mtds.size(), std::vector<double>(p.segments(), 0.0));
    return plan;
}

/// Tasks held by each server in each segment ([segment][server]). Tasks with
/// zero power are never offloaded and hold nothing.
inline std::vector<std::vector<std::size_t>> server_counts(const Process& p, const Plan& plan) {
    std::vector<std::vector<std::size_t>> counts(p.segments(), std::vector<std::size_t>(p.servers.size(), 0));
    for (std::size_t m = 0; m < p.mtds.size(); ++m)
        for (std::size_t k = 0; k < p.segments(); ++k)
            if (plan.power[m][k] > 0.0) ++counts[k][p.mtds[m].routes[plan.target[m][k]].server];
    return counts;
}

/// Latency of one task given its route, first-hop power and the number of
/// tasks sharing its server. `fading`, when given, holds one span of block
/// factors per hop.
inline double task_latency(const Process& p, std::size_t m, std::size_t k, std::size_t route, double power,
                           std::size_t sharing, std::span<const std::span<const double>> fading = {}) {
    if (!(power > 0.0)) return kZeroPowerLatency;
    const auto& mtd = p.mtds[m];
    const auto& profile = mtd.hops[k][route];
    std::vector<HopInput> hops(profile.begin(), profile.end());
    hops.front().power = power;
    for (std::size_t h = 0; h < hops.size() && h < fading.size(); ++h) hops[h].fading = fading[h];
    const double share = server_share(p.servers[mtd.routes[route].server].capacity, std::max<std::size_t>(sharing, 1));
    try {
        return route_latency(mtd.task, hops, share).total;
    } catch (const InfeasibleError&) {
        return kZeroPowerLatency;
    }
}

inline void check_plan(const Process& p, const Plan& plan) {
    if (plan.target.size() != p.mtds.size() || plan.power.size() != p.mtds.size())
        throw Error("plan: shape does not match the process");
    for (std::size_t m = 0; m < p.mtds.size(); ++m) {
        if (plan.target[m].size() != p.segments() || plan.power[m].size() != p.segments())
            throw Error("plan: shape does not match the process");
        for (std::size_t k = 0; k < p.segments(); ++k)
            if (plan.target[m][k] >= p.mtds[m].routes.size()) throw Error("plan: route index out of range");
    }
}

/// Predicted latency of every task, [mtd][segment].
inline std::vector<std::vector<double>> task_latencies(const Process& p, const Plan& plan) {
    check_plan(p, plan);
    const auto counts = server_counts(p, plan);
    std::vector<std::vector<double>> out(p.mtds.size(), std::vector<double>(p.segments(), 0.0));
    for (std::size_t m = 0; m < p.mtds.size(); ++m)
        for (std::size_t k = 0; k < p.segments(); ++k) {
            const auto r = plan.target[m][k];
            out[m][k] = task_latency(p, m, k, r, plan.power[m][k], counts[k][p.mtds[m].routes[r].server]);
        }
    return out;
}

/// Sum of predicted task latencies, MTD-major.
inline double plan_objective(const Process& p, const Plan& plan) {
    double total = 0.0;
    for (const auto& row : task_latencies(p, plan))
        for (double v : row) total += v;
    return total;
}

/// Energy and power-cap feasibility with an absolute slack.
inline bool plan_feasible(const Process& p, const Plan& plan, double slack = 1e-12) {
    check_plan(p, plan);
    for (std::size_t m = 0; m < p.mtds.size(); ++m) {
        double energy = 0.0;
        for (std::size_t k = 0; k < p.segments(); ++k) {
            const double pw = plan.power[m][k];
            if (pw < -slack || pw > p.mtds[m].max_power + slack) return false;
            energy += pw * p.durations[k];
        }
        if (energy > p.mtds[m].energy_budget + slack) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Building a process from a topology

struct ProcessTask {
    NodeId mtd;
    Task task;
};

/// Segment midpoints measured from `start`.
inline std::vector<double> segment_midpoints(std::span<const double> durations, double start) {
    std::vector<double> out;
    double t = start;
    for (double d : durations) {
        out.push_back(t + d / 2.0);
        t += d;
    }
    return out;
}

/// Candidate routes are the shortest route to each reachable active server.
/// Gains come from `env` at each segment midpoint: MTD uplinks read radio
/// maps when the environment has them, other hops use the path-loss model.
inline Process build_process(const Topology& topo, const ChannelEnvironment& env, std::span<const ProcessTask> tasks,
                             std::span<const double> durations, double start = 0.0, std::size_t max_hops = 8) {
    Process p;
    p.durations.assign(durations.begin(), durations.end());
    const auto mids = segment_midpoints(durations, start);

    auto server_index = [&](const Node& n) {
        for (std::size_t i = 0; i < p.servers.size(); ++i)
            if (p.servers[i].id == n.id) return i;
        p.servers.push_back({n.id, n.server->capacity});
        return p.servers.size() - 1;
    };

    for (const auto& pt : tasks) {
        const Node& node = topo.at(pt.mtd);
        if (node.kind != NodeKind::Mtd) throw Error("build_process: '" + pt.mtd + "' is not an MTD");
        ProcessMtd m{node.id, pt.task, node.energy_budget, node.max_tx_power, {}, {}};
        m.task.owner = node.id;
        const auto routes =
            shortest_route_per_server(reachable_servers(topo, node.id, ActivationPolicy::ExcludeDeactivated, max_hops));
        for (const auto& r : routes) {
            m.routes.push_back({r.server, server_index(topo.at(r.server)), topo.links[r.links.front()].kind, r.links});
        }
        for (double t : mids) {
            std::vector<std::vector<HopInput>> seg;
            for (const auto& r : routes) {
                std::vector<HopInput> hops;
                for (auto li : r.links) {
                    const auto& l = topo.links[li];
                    const auto& tx = topo.at(l.src);
                    const auto& rx = topo.at(l.dst);
                    const double gain = l.kind == LinkKind::Fiber
                                            ? 1.0
                                            : env.gain(l.kind, node_position(tx, t), node_position(rx, t),
                                                       tx.kind == NodeKind::Mtd);
                    hops.push_back(hop_input(l, tx.kind == NodeKind::Mtd ? 0.0 : tx.relay_power, gain,
                                             link_prop_delay(topo, l, t)));
                }
                seg.push_back(std::move(hops));
            }
            m.hops.push_back(std::move(seg));
        }
        p.mtds.push_back(std::move(m));
    }
    return p;
}

} // namespace satmec
