#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "satmec/channel.hpp"
#include "satmec/core.hpp"
#include "satmec/csv.hpp"
#include "satmec/error.hpp"
#include "satmec/geometry.hpp"

namespace satmec {

/// Normalized resources, both in (0, 1].
struct ResourcePair {
    double comm = 1.0;
    double comp = 1.0;
};

struct LatencyModelParams {
    double alpha = 1.0; // s, weight of 1/comm
    double beta = 1.0;  // s, weight of 1/comp
};

/// Latency as a linear combination of the reciprocal resources.
inline double schematic_latency(ResourcePair r, LatencyModelParams p) {
    if (!(r.comm > 0.0 && r.comm <= 1.0 && r.comp > 0.0 && r.comp <= 1.0))
        throw Error("schematic_latency: resources must lie in (0, 1]");
    if (!(p.alpha >= 0.0 && p.beta >= 0.0 && p.alpha + p.beta > 0.0))
        throw Error("schematic_latency: need alpha, beta >= 0 and alpha + beta > 0");
    return p.alpha / r.comm + p.beta / r.comp;
}

inline double compute_latency(const Task& task, double f_alloc) {
    if (!(f_alloc > 0.0)) throw Error("compute_latency: allocated CPU rate must be positive");
    return task.cycles / f_alloc;
}

/// Equal sharing of a server among the tasks it holds in one segment.
inline double server_share(double capacity, std::size_t n_tasks) {
    if (n_tasks == 0 || !(capacity > 0.0)) throw Error("server_share: need capacity > 0 and at least one task");
    return capacity / static_cast<double>(n_tasks);
}

/// One resolved hop. Wired hops (fiber) cost propagation only. When
/// `fading` is non-empty the hop rate is the mean Shannon rate over those
/// power factors (one per coherence block).
struct HopInput {
    double bandwidth = 0.0;
    double noise_psd = 0.0;
    double power = 0.0;
    double gain = 0.0;
    double prop_delay = 0.0;
    bool wired = false;
    std::span<const double> fading{};
};

inline double hop_rate(const HopInput& h) {
    if (h.fading.empty()) return link_rate(h.power, h.gain, h.bandwidth, h.noise_psd);
    double sum = 0.0;
    for (double f : h.fading) sum += link_rate(h.power, h.gain * f, h.bandwidth, h.noise_psd);
    return sum / static_cast<double>(h.fading.size());
}

inline HopInput hop_input(const Link& l, double power, double gain, double prop_delay) {
    return {l.bandwidth, l.noise_psd, power, gain, prop_delay, l.kind == LinkKind::Fiber, {}};
}

struct LatencyBreakdown {
    std::vector<double> transmit;
    std::vector<double> propagation;
    double compute = 0.0;
    double total = 0.0;
};

/// Sum of the breakdown in its canonical order: hop by hop (transmit, then
/// propagation), compute last.
inline double breakdown_sum(const LatencyBreakdown& b) {
    double s = 0.0;
    for (std::size_t h = 0; h < b.transmit.size(); ++h) {
        s += b.transmit[h];
        s += b.propagation[h];
    }
    return s + b.compute;
}

/// Store-and-forward latency of one task: every hop carries the whole task,
/// then the server computes it. Result return is not modelled.
inline LatencyBreakdown route_latency(const Task& task, std::span<const HopInput> hops, double f_alloc) {
    LatencyBreakdown b;
    for (const auto& h : hops) {
        double tx = 0.0;
        if (!h.wired) {
            const double rate = hop_rate(h);
            if (!(rate > 0.0)) throw InfeasibleError("infeasible route: zero-rate hop");
            tx = task.data_size / rate;
        }
        b.transmit.push_back(tx);
        b.propagation.push_back(h.prop_delay);
    }
    b.compute = compute_latency(task, f_alloc);
    b.total = breakdown_sum(b);
    return b;
}

/// Propagation delay of a link at time `t`: the fixed delay when set,
/// otherwise the endpoint distance over c.
inline double link_prop_delay(const Topology& t, const Link& l, double time) {
    if (l.fixed_prop_delay) return *l.fixed_prop_delay;
    return propagation_delay(node_position(t.at(l.src), time), node_position(t.at(l.dst), time));
}

/// Route latency over a topology route at time `t`. `powers` and `gains`
/// hold one entry per hop; the first hop is bounded by the MTD's power cap.
inline LatencyBreakdown route_latency(const Task& task, const Topology& topo, const Route& route,
                                      std::span<const double> powers, std::span<const double> gains, double f_alloc,
                                      double t) {
    if (powers.size() != route.links.size() || gains.size() != route.links.size())
        throw Error("route_latency: need one power and one gain per hop");
    if (route.links.empty()) throw Error("route_latency: empty route");
    const auto& first = topo.links.at(route.links.front());
    const auto& mtd = topo.at(first.src);
    if (mtd.kind == NodeKind::Mtd && powers.front() > mtd.max_tx_power)
        throw Error("route_latency: first-hop power exceeds the MTD cap");
    std::vector<HopInput> hops;
    for (std::size_t h = 0; h < route.links.size(); ++h) {
        const auto& l = topo.links.at(route.links[h]);
        hops.push_back(hop_input(l, powers[h], gains[h], link_prop_delay(topo, l, t)));
    }
    return route_latency(task, hops, f_alloc);
}

inline void write_breakdown_header(std::ostream& os) {
    write_csv_row(os, {"task", "route", "transmit_s", "propagation_s", "compute_s", "total_s"});
}

/// Per-hop columns list one value per hop separated by ';'.
inline void write_breakdown_row(std::ostream& os, const std::string& task_id, const std::string& route_id,
                                const LatencyBreakdown& b) {
    write_csv_row(os, {task_id, route_id, join_numbers(b.transmit), join_numbers(b.propagation),
                       format_number(b.compute), format_number(b.total)});
}

} // namespace satmec
