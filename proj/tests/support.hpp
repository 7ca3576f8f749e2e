#pragma once

// Random instances and independent oracles shared by the unit and
// acceptance tests. Oracles recompute everything from raw numbers and never
// call the library's rate, latency, allocation or placement routines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "satmec/process.hpp"
#include "satmec/rng.hpp"

namespace testsupport {

using satmec::HopInput;
using satmec::Process;
using satmec::ProcessMtd;
using satmec::RouteOption;

/// Uplink with a given SNR at power `p_ref`.
inline HopInput uplink(double bandwidth, double snr_at_ref, double p_ref, double prop) {
    const double noise = 4e-21;
    HopInput h;
    h.bandwidth = bandwidth;
    h.noise_psd = noise;
    h.gain = snr_at_ref * noise * bandwidth / p_ref;
    h.prop_delay = prop;
    return h;
}

/// M MTDs, K segments, two routes each: a one-hop uplink to a small edge
/// server, or a satellite uplink plus a wireless feeder relay and a fiber
/// hop to a large cloud server.
inline Process random_process(std::uint64_t seed, std::size_t M, std::size_t K) {
    satmec::Rng rng(seed);
    Process p;
    for (std::size_t k = 0; k < K; ++k) p.durations.push_back(rng.uniform(0.5, 2.0));
    p.servers.push_back({"edge", rng.uniform(1e9, 5e9)});
    p.servers.push_back({"cloud", 1e11});
    for (std::size_t m = 0; m < M; ++m) {
        ProcessMtd mtd;
        mtd.id = "mtd" + std::to_string(m);
        mtd.task = {rng.uniform(1e6, 5e6), rng.uniform(2e8, 2e9), mtd.id};
        mtd.max_power = rng.uniform(0.1, 1.0);
        double full = 0.0;
        for (double d : p.durations) full += d * mtd.max_power;
        mtd.energy_budget = rng.uniform(0.3, 1.2) * full;
        mtd.routes = {RouteOption{"edge", 0, satmec::LinkKind::UserAccess, {}},
                      RouteOption{"cloud", 1, satmec::LinkKind::UserSatellite, {}}};
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<std::vector<HopInput>> seg;
            seg.push_back({uplink(10e6, std::exp(rng.uniform(0.0, std::log(30.0))), mtd.max_power, 1e-6)});
            HopInput feeder = uplink(200e6, rng.uniform(5.0, 50.0), 10.0, 2e-3);
            feeder.power = 10.0;
            HopInput fiber;
            fiber.wired = true;
            fiber.prop_delay = 0.02;
            seg.push_back({uplink(5e6, std::exp(rng.uniform(std::log(0.3), std::log(10.0))), mtd.max_power, 2e-3),
                           feeder, fiber});
            mtd.hops.push_back(std::move(seg));
        }
        p.mtds.push_back(std::move(mtd));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Latency oracle

inline double shannon(double p, const HopInput& h) {
    return h.bandwidth * std::log2(1.0 + p * h.gain / (h.noise_psd * h.bandwidth));
}

/// Transmit time of the first hop at power p.
inline double first_hop_time(const Process& proc, std::size_t m, std::size_t k, std::size_t r, double p) {
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    return proc.mtds[m].task.data_size / shannon(p, proc.mtds[m].hops[k][r][0]);
}

/// Everything except the first hop's transmit time and the compute time.
inline double route_fixed_time(const Process& proc, std::size_t m, std::size_t k, std::size_t r) {
    const auto& hops = proc.mtds[m].hops[k][r];
    double t = hops[0].prop_delay;
    for (std::size_t h = 1; h < hops.size(); ++h) {
        if (!hops[h].wired) t += proc.mtds[m].task.data_size / shannon(hops[h].power, hops[h]);
        t += hops[h].prop_delay;
    }
    return t;
}

/// Total latency of an assignment `route[m][k]` with powers `power[m][k]`,
/// all powers positive.
inline double total_latency(const Process& proc, const std::vector<std::vector<std::size_t>>& route,
                            const std::vector<std::vector<double>>& power) {
    double total = 0.0;
    for (std::size_t k = 0; k < proc.segments(); ++k) {
        std::map<std::size_t, int> load;
        for (std::size_t m = 0; m < proc.mtds.size(); ++m) ++load[proc.mtds[m].routes[route[m][k]].server];
        for (std::size_t m = 0; m < proc.mtds.size(); ++m) {
            const auto r = route[m][k];
            const auto s = proc.mtds[m].routes[r].server;
            total += first_hop_time(proc, m, k, r, power[m][k]) + route_fixed_time(proc, m, k, r) +
                     proc.mtds[m].task.cycles * load[s] / proc.servers[s].capacity;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Grid-search power oracle

/// Minimum of sum_k data / rate_k(p_k) subject to sum_k p_k tau_k <= E and
/// 0 <= p_k <= pmax, searching p_1..p_{K-1} on a lattice of step
/// `step_frac * pmax` and giving the last segment all remaining energy (the
/// objective decreases in every p_k).
inline double grid_min_comm(const Process& proc, std::size_t m, const std::vector<std::size_t>& row,
                            double step_frac) {
    const auto& mtd = proc.mtds[m];
    const std::size_t K = proc.segments();
    const double pmax = mtd.max_power;
    const auto steps = static_cast<std::size_t>(std::llround(1.0 / step_frac));
    std::vector<std::vector<double>> table(K);
    for (std::size_t k = 0; k + 1 < K; ++k)
        for (std::size_t i = 0; i <= steps; ++i)
            table[k].push_back(first_hop_time(proc, m, k, row[k], pmax * static_cast<double>(i) / static_cast<double>(steps)));

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(K > 0 ? K - 1 : 0, 0);
    while (true) {
        double used = 0.0, partial = 0.0;
        for (std::size_t k = 0; k + 1 < K; ++k) {
            used += pmax * static_cast<double>(idx[k]) / static_cast<double>(steps) * proc.durations[k];
            partial += table[k][idx[k]];
        }
        if (used <= mtd.energy_budget && partial < best) {
            const double last = std::min(pmax, (mtd.energy_budget - used) / proc.durations[K - 1]);
            const double v = partial + first_hop_time(proc, m, K - 1, row[K - 1], last);
            best = std::min(best, v);
        }
        std::size_t pos = idx.size();
        bool done = true;
        while (pos-- > 0) {
            if (++idx[pos] <= steps) {
                done = false;
                break;
            }
            idx[pos] = 0;
        }
        if (done) break;
    }
    return best;
}

/// Grid oracle of the whole joint problem: every assignment, each MTD row's
/// power problem solved by grid search (memoized per MTD and row). All MTDs
/// must offer the same number of routes.
inline double grid_oracle(const Process& proc, double step_frac) {
    const std::size_t M = proc.mtds.size(), K = proc.segments();
    const std::size_t R = proc.mtds.front().routes.size();
    std::size_t rows_per_mtd = 1;
    for (std::size_t k = 0; k < K; ++k) rows_per_mtd *= R;
    auto decode = [&](std::size_t code) {
        std::vector<std::size_t> row(K);
        for (std::size_t k = K; k-- > 0;) {
            row[k] = code % R;
            code /= R;
        }
        return row;
    };
    std::vector<std::vector<double>> comm(M, std::vector<double>(rows_per_mtd));
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t c = 0; c < rows_per_mtd; ++c) comm[m][c] = grid_min_comm(proc, m, decode(c), step_frac);

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> choice(M, 0);
    while (true) {
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            std::map<std::size_t, int> load;
            for (std::size_t m = 0; m < M; ++m) ++load[proc.mtds[m].routes[decode(choice[m])[k]].server];
            for (std::size_t m = 0; m < M; ++m) {
                const auto r = decode(choice[m])[k];
                const auto s = proc.mtds[m].routes[r].server;
                total += route_fixed_time(proc, m, k, r) + proc.mtds[m].task.cycles * load[s] / proc.servers[s].capacity;
            }
        }
        for (std::size_t m = 0; m < M; ++m) total += comm[m][choice[m]];
        best = std::min(best, total);
        std::size_t pos = M;
        bool done = true;
        while (pos-- > 0) {
            if (++choice[pos] < rows_per_mtd) {
                done = false;
                break;
            }
            choice[pos] = 0;
        }
        if (done) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Placement oracle

struct SubsetOracle {
    std::vector<std::size_t> subset;
    double cost = std::numeric_limits<double>::infinity();
};

/// Brute force over all nonempty subsets by recursion; ties keep the
/// lexicographically smallest index list.
inline SubsetOracle placement_brute_force(std::size_t n, const std::vector<double>& demand, double h, double s,
                                          std::size_t budget) {
    SubsetOracle best;
    std::vector<std::size_t> cur;
    auto cost_of = [&](const std::vector<std::size_t>& servers) {
        double relay = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t d = n;
            for (auto j : servers) {
                const std::size_t fwd = (j + n - i) % n, back = (i + n - j) % n;
                d = std::min({d, fwd, back});
            }
            if (d > budget) return std::numeric_limits<double>::infinity();
            relay += demand[i] * static_cast<double>(d);
        }
        return h * static_cast<double>(servers.size()) + s * relay;
    };
    auto visit = [&](auto&& self, std::size_t next) -> void {
        if (next == n) {
            if (cur.empty()) return;
            const double c = cost_of(cur);
            if (!std::isfinite(c)) return;
            const bool tie = std::abs(c - best.cost) <= 1e-12 * std::max(1.0, std::abs(c));
            if (c < best.cost && !tie) best = {cur, c};
            else if (tie && cur < best.subset) best = {cur, c};
            return;
        }
        cur.push_back(next);
        self(self, next + 1);
        cur.pop_back();
        self(self, next + 1);
    };
    visit(visit, 0);
    return best;
}

} // namespace testsupport
