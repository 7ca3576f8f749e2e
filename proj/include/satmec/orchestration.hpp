#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "satmec/channel.hpp"
#include "satmec/core.hpp"
#include "satmec/csv.hpp"
#include "satmec/error.hpp"
#include "satmec/geometry.hpp"
#include "satmec/optimizer.hpp"
#include "satmec/process.hpp"
#include "satmec/structures.hpp"

namespace satmec {

struct MtdDemand {
    NodeId mtd;
    Task task;
    double rate = 0.0;   // tasks per second, drives server duty
    double target = 0.0; // latency target, s
};

struct DemandSnapshot {
    std::size_t period = 0;
    double duration = 0.0; // s
    std::vector<MtdDemand> mtds;
};

inline void check_demand(const DemandSnapshot& d) {
    if (!(d.duration > 0.0)) throw Error("period " + std::to_string(d.period) + ": duration must be positive");
    for (const auto& m : d.mtds) {
        if (!(m.target > 0.0)) throw Error("period " + std::to_string(d.period) + ": target of '" + m.mtd + "' must be positive");
        if (!(m.rate >= 0.0)) throw Error("period " + std::to_string(d.period) + ": rate of '" + m.mtd + "' is negative");
    }
}

/// Deployable UAVs. Each carries an MEC server, takes uplinks from the MTDs
/// closest to it and relays to every satellite.
struct FleetSpec {
    std::size_t size = 0;
    double altitude = 100.0;
    MecServer server{};
    double relay_power = 1.0;
    double access_bandwidth = 10e6;
    double backhaul_bandwidth = 20e6;
    double noise_psd = 4e-21;
    std::string id_prefix = "uav";
};

struct ServerState {
    NodeId id;
    bool on = false;
    double duty = 0.0; // busy fraction while on
    double active_power = 0.0;
    double idle_power = 0.0;
};

struct PeriodDecision {
    std::size_t period = 0;
    double start = 0.0;
    double duration = 0.0;
    std::vector<ServerState> servers;  // network servers in node order, then UAVs
    std::vector<std::size_t> isls;     // network link indices switched on
    std::vector<Position> uavs;
    std::vector<std::string> structure_tags;
};

struct PeriodReport {
    PeriodDecision decision;
    std::vector<double> latencies; // predicted, per demand MTD
    double satisfaction = 1.0;
    double energy = 0.0; // J
};

struct OrchestrationTimeline {
    std::vector<PeriodReport> on_demand;
    std::vector<PeriodReport> always_on;

    static double energy(const std::vector<PeriodReport>& r) {
        double e = 0.0;
        for (const auto& p : r) e += p.energy;
        return e;
    }
};

/// Energy of one period: on servers draw duty * active + (1 - duty) * idle,
/// off servers nothing; every switched-on ISL draws its link power.
inline double period_energy(const PeriodDecision& d, const Topology& network, double duration) {
    double e = 0.0;
    for (const auto& s : d.servers) {
        if (!s.on) continue;
        if (s.duty < 0.0 || s.duty > 1.0) throw Error("period_energy: duty of '" + s.id + "' outside [0, 1]");
        e += duration * (s.duty * s.active_power + (1.0 - s.duty) * s.idle_power);
    }
    for (auto i : d.isls) e += duration * network.links.at(i).active_power;
    return e;
}

// ---------------------------------------------------------------------------
// Latency prediction for a candidate configuration

struct OrchestrationContext {
    const Topology& network;
    const ChannelEnvironment& env;
    const FleetSpec& fleet;
};

/// The network with servers switched per `on` and UAVs added.
inline Topology realize_network(const OrchestrationContext& ctx, const std::set<NodeId>& on,
                                std::span<const Position> uavs, const DemandSnapshot& demand) {
    Topology t = ctx.network;
    for (auto& n : t.nodes)
        if (n.server) n.server->activation = on.contains(n.id) ? 1.0 : 0.0;
    if (uavs.empty()) return t;

    std::vector<NodeId> ids;
    for (std::size_t u = 0; u < uavs.size(); ++u) {
        Node n = make_node(ctx.fleet.id_prefix + std::to_string(u), NodeKind::AccessPlatform, uavs[u]);
        if (t.find(n.id)) throw Error("UAV id '" + n.id + "' collides with a network node");
        n.server = ctx.fleet.server;
        n.server->activation = 1.0;
        n.relay_power = ctx.fleet.relay_power;
        ids.push_back(n.id);
        t.nodes.push_back(std::move(n));
    }
    std::vector<Position> ground;
    for (const auto& m : demand.mtds) ground.push_back(t.at(m.mtd).position);
    const auto assoc = nearest_association(ground, uavs);
    for (std::size_t i = 0; i < demand.mtds.size(); ++i)
        t.links.push_back({demand.mtds[i].mtd, ids[assoc[i]], LinkKind::UserAccess, ctx.fleet.access_bandwidth,
                           ctx.fleet.noise_psd, 1.0, std::nullopt, 0.0});
    for (const auto& id : ids)
        for (const auto& n : ctx.network.nodes)
            if (n.kind == NodeKind::Satellite)
                t.links.push_back({id, n.id, LinkKind::AccessSatellite, ctx.fleet.backhaul_bandwidth,
                                   ctx.fleet.noise_psd, 1.0, std::nullopt, 0.0});
    return t;
}

struct Prediction {
    Topology network;
    std::vector<double> latencies;           // per demand MTD; +inf without a server
    std::vector<std::optional<NodeId>> serving;
    std::vector<std::size_t> used_links;     // indices into `network`, ascending
};

/// Best-route latency of every demand MTD: one segment spanning the period,
/// first hop at the MTD power cap, routes picked by best response with
/// equal CPU sharing.
inline Prediction predict_period(const OrchestrationContext& ctx, const std::set<NodeId>& on,
                                 std::span<const Position> uavs, const DemandSnapshot& demand, double start) {
    Prediction pr;
    pr.network = realize_network(ctx, on, uavs, demand);
    pr.latencies.assign(demand.mtds.size(), std::numeric_limits<double>::infinity());
    pr.serving.assign(demand.mtds.size(), std::nullopt);

    std::vector<ProcessTask> tasks;
    std::vector<std::size_t> which;
    for (std::size_t i = 0; i < demand.mtds.size(); ++i) {
        const auto& m = demand.mtds[i];
        if (reachable_servers(pr.network, m.mtd, ActivationPolicy::ExcludeDeactivated).empty()) continue;
        tasks.push_back({m.mtd, m.task});
        which.push_back(i);
    }
    if (tasks.empty()) return pr;

    const double durations[] = {demand.duration};
    const Process proc = build_process(pr.network, ctx.env, tasks, durations, start);
    Plan plan = empty_plan(proc);
    for (std::size_t m = 0; m < proc.mtds.size(); ++m) plan.power[m][0] = proc.mtds[m].max_power;
    segment_best_response(proc, plan, 0);
    const auto lat = task_latencies(proc, plan);

    std::set<std::size_t> used;
    for (std::size_t m = 0; m < proc.mtds.size(); ++m) {
        const auto& route = proc.mtds[m].routes[plan.target[m][0]];
        pr.latencies[which[m]] = lat[m][0];
        pr.serving[which[m]] = route.server_id;
        used.insert(route.links.begin(), route.links.end());
    }
    pr.used_links.assign(used.begin(), used.end());
    return pr;
}

inline bool targets_met(const Prediction& p, const DemandSnapshot& d, std::size_t i) {
    return p.latencies[i] <= d.mtds[i].target;
}

inline double satisfaction_ratio(const Prediction& p, const DemandSnapshot& d) {
    if (d.mtds.empty()) return 1.0;
    std::size_t met = 0;
    for (std::size_t i = 0; i < d.mtds.size(); ++i) met += targets_met(p, d, i) ? 1 : 0;
    return static_cast<double>(met) / static_cast<double>(d.mtds.size());
}

namespace detail {

inline std::vector<std::string> structure_tags(const Topology& t, const PeriodDecision& d) {
    bool gw = false, sat = false;
    for (const auto& s : d.servers) {
        if (!s.on) continue;
        if (const Node* n = t.find(s.id)) {
            gw = gw || n->kind == NodeKind::Gateway;
            sat = sat || n->kind == NodeKind::Satellite;
        }
    }
    std::vector<std::string> tags;
    if (!d.uavs.empty()) tags.emplace_back(to_string(StructureKind::ComputingInForwardLink));
    if (sat) tags.emplace_back(to_string(StructureKind::ComputingOnOrbit));
    if (gw) tags.emplace_back(to_string(StructureKind::ComputingAfterFeederLink));
    return tags;
}

} // namespace detail

/// Turns a configuration and its prediction into a decision. Duty of a
/// server is the offered load of the MTDs it serves over its capacity, or 1
/// when `full_duty` is set.
inline PeriodDecision make_decision(const OrchestrationContext& ctx, const DemandSnapshot& demand, double start,
                                    const std::set<NodeId>& on, std::span<const Position> uavs,
                                    const Prediction& pr, bool full_duty, bool all_isls) {
    PeriodDecision d;
    d.period = demand.period;
    d.start = start;
    d.duration = demand.duration;
    d.uavs.assign(uavs.begin(), uavs.end());
    auto duty_of = [&](const NodeId& id, double capacity) {
        if (full_duty) return 1.0;
        double load = 0.0;
        for (std::size_t i = 0; i < demand.mtds.size(); ++i)
            if (pr.serving[i] == id) load += demand.mtds[i].rate * demand.mtds[i].task.cycles;
        return std::min(1.0, load / capacity);
    };
    for (const auto& n : ctx.network.nodes) {
        if (!n.server) continue;
        const bool is_on = on.contains(n.id);
        d.servers.push_back({n.id, is_on, is_on ? duty_of(n.id, n.server->capacity) : 0.0, n.server->active_power,
                             n.server->idle_power});
    }
    for (std::size_t u = 0; u < uavs.size(); ++u) {
        const auto id = ctx.fleet.id_prefix + std::to_string(u);
        d.servers.push_back({id, true, duty_of(id, ctx.fleet.server.capacity), ctx.fleet.server.active_power,
                             ctx.fleet.server.idle_power});
    }
    for (std::size_t i = 0; i < ctx.network.links.size(); ++i) {
        if (ctx.network.links[i].kind != LinkKind::Isl) continue;
        if (all_isls || std::binary_search(pr.used_links.begin(), pr.used_links.end(), i)) d.isls.push_back(i);
    }
    d.structure_tags = detail::structure_tags(ctx.network, d);
    return d;
}

inline PeriodReport make_report(const OrchestrationContext& ctx, const DemandSnapshot& demand, PeriodDecision d,
                                const Prediction& pr) {
    PeriodReport r;
    r.latencies = pr.latencies;
    r.satisfaction = satisfaction_ratio(pr, demand);
    r.energy = period_energy(d, ctx.network, demand.duration);
    r.decision = std::move(d);
    return r;
}

// ---------------------------------------------------------------------------
// Policies

class OrchestrationPolicy {
public:
    virtual ~OrchestrationPolicy() = default;
    virtual PeriodReport decide(const OrchestrationContext& ctx, const DemandSnapshot& demand, double start) const = 0;
};

/// Starts with every server off and switches servers on in ascending
/// active-power order (node order on ties) until all targets are met; if
/// they still are not, deploys 1, 2, ... UAVs over the MTDs left unmet.
class GreedyActivationPolicy : public OrchestrationPolicy {
public:
    PeriodReport decide(const OrchestrationContext& ctx, const DemandSnapshot& demand, double start) const override {
        check_demand(demand);
        auto all_met = [&](const Prediction& p) { return satisfaction_ratio(p, demand) >= 1.0; };

        std::vector<const Node*> order;
        for (const auto& n : ctx.network.nodes)
            if (n.server) order.push_back(&n);
        std::stable_sort(order.begin(), order.end(),
                         [](const Node* a, const Node* b) { return a->server->active_power < b->server->active_power; });

        std::set<NodeId> on;
        std::vector<Position> uavs;
        Prediction pr = predict_period(ctx, on, uavs, demand, start);
        for (const Node* n : order) {
            if (all_met(pr)) break;
            on.insert(n->id);
            pr = predict_period(ctx, on, uavs, demand, start);
        }
        if (!all_met(pr) && ctx.fleet.size > 0) {
            std::vector<Position> unmet;
            for (std::size_t i = 0; i < demand.mtds.size(); ++i)
                if (!targets_met(pr, demand, i)) unmet.push_back(ctx.network.at(demand.mtds[i].mtd).position);
            for (std::size_t n = 1; n <= ctx.fleet.size; ++n) {
                uavs = place_uavs(unmet, n, ctx.fleet.altitude);
                pr = predict_period(ctx, on, uavs, demand, start);
                if (all_met(pr)) break;
            }
        }
        return make_report(ctx, demand, make_decision(ctx, demand, start, on, uavs, pr, false, false), pr);
    }
};

/// Reference configuration: every server on at full duty, every ISL on and
/// the whole fleet aloft. UAVs keep the on-demand positions; the rest hover
/// over all active MTDs.
inline PeriodReport always_on_period(const OrchestrationContext& ctx, const DemandSnapshot& demand, double start,
                                     std::span<const Position> on_demand_uavs) {
    std::set<NodeId> on;
    for (const auto& n : ctx.network.nodes)
        if (n.server) on.insert(n.id);
    std::vector<Position> uavs(on_demand_uavs.begin(), on_demand_uavs.end());
    if (uavs.size() < ctx.fleet.size && !demand.mtds.empty()) {
        std::vector<Position> ground;
        for (const auto& m : demand.mtds) ground.push_back(ctx.network.at(m.mtd).position);
        const auto extra = place_uavs(ground, ctx.fleet.size - uavs.size(), ctx.fleet.altitude);
        uavs.insert(uavs.end(), extra.begin(), extra.end());
    }
    const auto pr = predict_period(ctx, on, uavs, demand, start);
    return make_report(ctx, demand, make_decision(ctx, demand, start, on, uavs, pr, true, true), pr);
}

inline PeriodReport orchestrate_period(const OrchestrationContext& ctx, const DemandSnapshot& demand, double start,
                                       const OrchestrationPolicy& policy) {
    return policy.decide(ctx, demand, start);
}

/// Periods run back to back from t = 0.
inline OrchestrationTimeline run_orchestration(std::span<const DemandSnapshot> periods, const OrchestrationContext& ctx,
                                               const OrchestrationPolicy& policy) {
    if (periods.empty()) throw Error("orchestration: need at least one period");
    if (!validate_topology(ctx.network).empty()) throw Error("orchestration: network fails validation");
    OrchestrationTimeline tl;
    double start = 0.0;
    for (const auto& d : periods) {
        auto r = orchestrate_period(ctx, d, start, policy);
        tl.always_on.push_back(always_on_period(ctx, d, start, r.decision.uavs));
        tl.on_demand.push_back(std::move(r));
        start += d.duration;
    }
    return tl;
}

/// Percent of the always-on energy saved by the on-demand timeline.
inline double energy_savings_percent(const OrchestrationTimeline& tl) {
    const double ref = OrchestrationTimeline::energy(tl.always_on);
    if (!(ref > 0.0)) return 0.0;
    return 100.0 * (1.0 - OrchestrationTimeline::energy(tl.on_demand) / ref);
}

// ---------------------------------------------------------------------------
// CSV

inline void write_timeline_header(std::ostream& os) {
    write_csv_row(os, {"period", "start_s", "duration_s", "active_servers", "duty", "active_isls", "uav_count",
                       "latency_p50_s", "latency_p95_s", "latency_max_s", "satisfaction", "energy_j", "structures"});
}

inline void write_timeline_rows(std::ostream& os, const Topology& network, const std::vector<PeriodReport>& reports) {
    for (const auto& r : reports) {
        const auto& d = r.decision;
        std::vector<std::string> on, duty, isls;
        for (const auto& s : d.servers) {
            if (!s.on) continue;
            on.push_back(s.id);
            duty.push_back(s.id + ":" + format_number(s.duty));
        }
        for (auto i : d.isls) isls.push_back(network.links[i].src + ">" + network.links[i].dst);
        auto sorted = r.latencies;
        std::sort(sorted.begin(), sorted.end());
        const double mx = sorted.empty() ? 0.0 : sorted.back();
        write_csv_row(os, {std::to_string(d.period), format_number(d.start), format_number(d.duration), join(on),
                           join(duty), join(isls), std::to_string(d.uavs.size()), format_number(percentile(sorted, 0.5)),
                           format_number(percentile(sorted, 0.95)), format_number(mx), format_number(r.satisfaction),
                           format_number(r.energy), join(d.structure_tags)});
    }
}

} // namespace satmec
