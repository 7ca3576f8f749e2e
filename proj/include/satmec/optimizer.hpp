#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satmec/channel.hpp"
#include "satmec/csv.hpp"
#include "satmec/error.hpp"
#include "satmec/process.hpp"
#include "satmec/rng.hpp"

namespace satmec {

// ---------------------------------------------------------------------------
// Power allocation for a fixed offloading row

/// First-hop channel of one segment.
struct SegmentChannel {
    double duration = 0.0;
    double gain = 0.0;
    double bandwidth = 0.0;
    double noise_psd = 0.0;
};

struct PowerAllocation {
    std::vector<double> powers;
    double multiplier = 0.0; // energy-budget Lagrange multiplier
    double objective = 0.0;  // sum of per-segment transmit latencies, s
};

namespace detail {

inline double snr_per_watt(const SegmentChannel& c) { return c.gain / (c.noise_psd * c.bandwidth); }

/// -d/dp of data / rate(p).
inline double marginal_latency(double data, const SegmentChannel& c, double p) {
    const double a = snr_per_watt(c);
    const double l = std::log1p(a * p);
    return data * a * std::numbers::ln2 / (c.bandwidth * (1.0 + a * p) * l * l);
}

/// Power at which the marginal latency equals `target`, capped at `pmax`.
inline double stationary_power(double data, const SegmentChannel& c, double pmax, double target) {
    if (marginal_latency(data, c, pmax) >= target) return pmax;
    double lo = 0.0, hi = pmax;
    for (int i = 0; i < 4000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (marginal_latency(data, c, mid) > target) lo = mid;
        else hi = mid;
    }
    return lo > 0.0 ? lo : hi;
}

inline double transmit_latency(double data, const SegmentChannel& c, double p) {
    const double r = link_rate(p, c.gain, c.bandwidth, c.noise_psd);
    return r > 0.0 ? data / r : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Minimizes sum_k data / rate_k(p_k) subject to sum_k p_k * duration_k <=
/// energy and 0 <= p_k <= pmax. The objective is convex and decreasing, so
/// the budget binds unless every segment runs at the cap; the multiplier is
/// found by geometric bisection and each p_k by bisection on stationarity.
inline PowerAllocation allocate_power(std::span<const SegmentChannel> segs, double data, double energy, double pmax) {
    if (segs.empty()) throw Error("allocate_power: no segments");
    if (!(data > 0.0) || !(energy > 0.0) || !(pmax > 0.0))
        throw Error("allocate_power: need positive data, energy budget and power cap");
    for (const auto& c : segs)
        if (!(c.duration > 0.0 && c.gain > 0.0 && c.bandwidth > 0.0 && c.noise_psd > 0.0))
            throw Error("allocate_power: segment parameters must be positive");

    PowerAllocation out;
    double full = 0.0;
    for (const auto& c : segs) full += pmax * c.duration;
    if (full <= energy) {
        out.powers.assign(segs.size(), pmax);
    } else {
        auto powers_at = [&](double lambda) {
            std::vector<double> p;
            for (const auto& c : segs) p.push_back(detail::stationary_power(data, c, pmax, lambda * c.duration));
            return p;
        };
        auto energy_at = [&](double lambda) {
            const auto p = powers_at(lambda);
            double e = 0.0;
            for (std::size_t k = 0; k < segs.size(); ++k) e += p[k] * segs[k].duration;
            return e;
        };
        double total_t = 0.0;
        for (const auto& c : segs) total_t += c.duration;
        const double seed = detail::marginal_latency(data, segs.front(), energy / total_t) / segs.front().duration;
        double lo = seed, hi = seed;
        for (int i = 0; i < 2000 && energy_at(lo) <= energy; ++i) lo /= 4.0;
        for (int i = 0; i < 2000 && energy_at(hi) > energy; ++i) hi *= 4.0;
        for (int i = 0; i < 400; ++i) {
            const double mid = std::sqrt(lo) * std::sqrt(hi);
            if (mid <= lo || mid >= hi) break;
            if (energy_at(mid) > energy) lo = mid;
            else hi = mid;
        }
        out.multiplier = hi;
        out.powers = powers_at(hi);
    }
    for (std::size_t k = 0; k < segs.size(); ++k) out.objective += detail::transmit_latency(data, segs[k], out.powers[k]);
    return out;
}

/// Relative KKT residuals of an allocation.
struct KktResiduals {
    double stationarity = 0.0;
    double complementarity = 0.0;
    double primal = 0.0;

    double max() const { return std::max({stationarity, complementarity, primal}); }
};

inline KktResiduals kkt_residuals(std::span<const SegmentChannel> segs, double data, double energy, double pmax,
                                  const PowerAllocation& a) {
    KktResiduals r;
    double used = 0.0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const double p = a.powers[k];
        used += p * segs[k].duration;
        r.primal = std::max({r.primal, std::max(0.0, -p) / pmax, std::max(0.0, p - pmax) / pmax});
        const double mg = detail::marginal_latency(data, segs[k], p);
        const double price = a.multiplier * segs[k].duration;
        const double scale = std::max(mg, price);
        // At the cap the bound multiplier mg - price must be nonnegative.
        const double viol = p >= pmax ? std::max(0.0, price - mg) : std::abs(mg - price);
        r.stationarity = std::max(r.stationarity, scale > 0.0 ? viol / scale : 0.0);
    }
    r.primal = std::max(r.primal, std::max(0.0, used - energy) / energy);
    if (a.multiplier > 0.0) r.complementarity = std::abs(energy - used) / energy;
    return r;
}

// ---------------------------------------------------------------------------
// Plan construction helpers

inline std::vector<SegmentChannel> row_channels(const Process& p, std::size_t m, std::span<const std::size_t> row) {
    std::vector<SegmentChannel> out;
    for (std::size_t k = 0; k < p.segments(); ++k) {
        const auto& h = p.mtds[m].hops[k][row[k]].front();
        out.push_back({p.durations[k], h.gain, h.bandwidth, h.noise_psd});
    }
    return out;
}

/// Optimal powers of MTD `m` for the routes already in `plan`.
inline void allocate_row_power(const Process& p, std::size_t m, Plan& plan) {
    const auto& mtd = p.mtds[m];
    const auto segs = row_channels(p, m, plan.target[m]);
    plan.power[m] = allocate_power(segs, mtd.task.data_size, mtd.energy_budget, mtd.max_power).powers;
}

namespace detail {

inline bool improves(double candidate, double incumbent) {
    if (std::isinf(incumbent)) return candidate < incumbent;
    return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent));
}

inline double segment_total(const Process& p, const Plan& plan, std::size_t k) {
    std::vector<std::size_t> counts(p.servers.size(), 0);
    for (std::size_t m = 0; m < p.mtds.size(); ++m)
        if (plan.power[m][k] > 0.0) ++counts[p.mtds[m].routes[plan.target[m][k]].server];
    double s = 0.0;
    for (std::size_t m = 0; m < p.mtds.size(); ++m) {
        const auto r = plan.target[m][k];
        s += task_latency(p, m, k, r, plan.power[m][k], counts[p.mtds[m].routes[r].server]);
    }
    return s;
}

} // namespace detail

/// Route choice for one segment with powers fixed: every MTD starts on its
/// best route as if alone, then round-robin sweeps move single MTDs while the
/// segment's total latency strictly drops. Lower route index wins ties.
inline void segment_best_response(const Process& p, Plan& plan, std::size_t k, std::size_t max_sweeps = 100) {
    for (std::size_t m = 0; m < p.mtds.size(); ++m) {
        std::size_t best = 0;
        double best_v = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < p.mtds[m].routes.size(); ++r) {
            const double v = task_latency(p, m, k, r, plan.power[m][k], 1);
            if (detail::improves(v, best_v)) {
                best_v = v;
                best = r;
            }
        }
        plan.target[m][k] = best;
    }
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        for (std::size_t m = 0; m < p.mtds.size(); ++m) {
            const auto current = plan.target[m][k];
            std::size_t best = current;
            double best_v = detail::segment_total(p, plan, k);
            for (std::size_t r = 0; r < p.mtds[m].routes.size(); ++r) {
                if (r == current) continue;
                plan.target[m][k] = r;
                const double v = detail::segment_total(p, plan, k);
                if (detail::improves(v, best_v)) {
                    best_v = v;
                    best = r;
                }
            }
            plan.target[m][k] = best;
            changed = changed || best != current;
        }
        if (!changed) break;
    }
}

/// Route choice minimizing one segment's total latency with powers fixed.
/// Enumerates all joint choices when there are at most `limit` of them
/// (first minimum in lexicographic order wins), otherwise best response.
inline void segment_optimum(const Process& p, Plan& plan, std::size_t k, std::size_t limit = 4096) {
    std::size_t total = 1;
    for (const auto& m : p.mtds) {
        if (total > limit / m.routes.size()) return segment_best_response(p, plan, k);
        total *= m.routes.size();
    }
    const std::size_t M = p.mtds.size();
    std::vector<std::size_t> best(M, 0);
    double best_v = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> cur(M, 0);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t m = M; m-- > 0;) {
            cur[m] = c % p.mtds[m].routes.size();
            c /= p.mtds[m].routes.size();
            plan.target[m][k] = cur[m];
        }
        const double v = detail::segment_total(p, plan, k);
        if (detail::improves(v, best_v)) {
            best_v = v;
            best = cur;
        }
    }
    for (std::size_t m = 0; m < M; ++m) plan.target[m][k] = best[m];
}

// ---------------------------------------------------------------------------
// Baselines

/// Every task goes over the MTD's direct satellite route (first one whose
/// first hop is user-satellite); powers from allocate_power.
inline Plan satellite_only_baseline(const Process& p) {
    check_process(p);
    Plan plan = empty_plan(p);
    for (std::size_t m = 0; m < p.mtds.size(); ++m) {
        const auto& routes = p.mtds[m].routes;
        auto it = std::find_if(routes.begin(), routes.end(),
                               [](const RouteOption& r) { return r.first_hop == LinkKind::UserSatellite; });
        if (it == routes.end()) throw InfeasibleError("satellite-only: MTD '" + p.mtds[m].id + "' has no satellite route");
        plan.target[m].assign(p.segments(), static_cast<std::size_t>(it - routes.begin()));
        allocate_row_power(p, m, plan);
    }
    return plan;
}

/// Myopic per-segment scheme: in segment order each MTD transmits at the
/// largest power its remaining energy allows for that segment, then routes
/// are chosen to minimize that segment's latency.
inline Plan state_oriented_baseline(const Process& p) {
    check_process(p);
    Plan plan = empty_plan(p);
    std::vector<double> remaining;
    for (const auto& m : p.mtds) remaining.push_back(m.energy_budget);
    for (std::size_t k = 0; k < p.segments(); ++k) {
        for (std::size_t m = 0; m < p.mtds.size(); ++m)
            plan.power[m][k] = remaining[m] > 0.0 ? std::min(p.mtds[m].max_power, remaining[m] / p.durations[k]) : 0.0;
        segment_optimum(p, plan, k);
        for (std::size_t m = 0; m < p.mtds.size(); ++m)
            remaining[m] = std::max(0.0, remaining[m] - plan.power[m][k] * p.durations[k]);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Process-oriented optimization

enum class OptimizerMethod { Exact, Alternating };

inline constexpr std::string_view to_string(OptimizerMethod m) {
    return m == OptimizerMethod::Exact ? "exact" : "alternating";
}

struct OptimizationResult {
    Plan plan;
    double objective = 0.0;
    std::size_t iterations = 0;
};

/// Largest number of joint offloading assignments the exact method enumerates.
inline constexpr std::size_t kMaxExactAssignments = 4096;

/// Number of joint offloading assignments, saturating above the exact limit.
inline std::size_t assignment_count(const Process& p) {
    std::size_t n = 1;
    for (const auto& m : p.mtds)
        for (std::size_t k = 0; k < p.segments(); ++k) {
            n *= m.routes.size();
            if (n > kMaxExactAssignments) return kMaxExactAssignments + 1;
        }
    return n;
}

namespace detail {

/// Row `code` of MTD m: route of segment 0 is the most significant digit.
inline std::vector<std::size_t> decode_row(std::size_t code, std::size_t routes, std::size_t segments) {
    std::vector<std::size_t> row(segments);
    for (std::size_t k = segments; k-- > 0;) {
        row[k] = code % routes;
        code /= routes;
    }
    return row;
}

inline std::size_t row_count(std::size_t routes, std::size_t segments) {
    std::size_t n = 1;
    for (std::size_t k = 0; k < segments; ++k) n *= routes;
    return n;
}

} // namespace detail

/// Enumerates every joint offloading assignment, solves the power problem of
/// each MTD row exactly, and keeps the lexicographically first minimizer.
inline OptimizationResult optimize_exact(const Process& p) {
    check_process(p);
    if (assignment_count(p) > kMaxExactAssignments)
        throw Error("exact optimizer: more than 4096 offloading assignments");
    const std::size_t M = p.mtds.size(), K = p.segments();

    struct RowSolution {
        std::vector<std::size_t> routes;
        std::vector<double> powers;
        double comm = 0.0;
    };
    std::vector<std::vector<RowSolution>> rows(M);
    // Per (m, k, r): relay transmit + propagation, or nullopt when a relay hop has no rate.
    std::vector<std::vector<std::vector<std::optional<double>>>> fixed(M);
    for (std::size_t m = 0; m < M; ++m) {
        const auto& mtd = p.mtds[m];
        const auto R = mtd.routes.size();
        for (std::size_t code = 0; code < detail::row_count(R, K); ++code) {
            auto row = detail::decode_row(code, R, K);
            const auto segs = row_channels(p, m, row);
            auto alloc = allocate_power(segs, mtd.task.data_size, mtd.energy_budget, mtd.max_power);
            rows[m].push_back({std::move(row), std::move(alloc.powers), alloc.objective});
        }
        fixed[m].resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t r = 0; r < R; ++r) {
                const auto& hops = mtd.hops[k][r];
                double f = hops.front().prop_delay;
                bool ok = true;
                for (std::size_t h = 1; h < hops.size(); ++h) {
                    if (!hops[h].wired) {
                        const double rate = hop_rate(hops[h]);
                        if (!(rate > 0.0)) ok = false;
                        else f += mtd.task.data_size / rate;
                    }
                    f += hops[h].prop_delay;
                }
                fixed[m][k].push_back(ok ? std::optional<double>(f) : std::nullopt);
            }
        }
    }

    std::vector<std::size_t> choice(M, 0), best_choice(M, 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::size_t>> counts(K, std::vector<std::size_t>(p.servers.size()));
    while (true) {
        for (auto& c : counts) std::fill(c.begin(), c.end(), 0);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t k = 0; k < K; ++k) ++counts[k][p.mtds[m].routes[rows[m][choice[m]].routes[k]].server];
        double total = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const auto& rs = rows[m][choice[m]];
            const double comm_total = rs.comm;
            double rest = 0.0;
            bool infeasible = false;
            for (std::size_t k = 0; k < K; ++k) {
                const auto r = rs.routes[k];
                const auto s = p.mtds[m].routes[r].server;
                if (!fixed[m][k][r]) {
                    infeasible = true;
                    break;
                }
                rest += *fixed[m][k][r] + p.mtds[m].task.cycles * static_cast<double>(counts[k][s]) / p.servers[s].capacity;
            }
            total += infeasible ? kZeroPowerLatency * static_cast<double>(K) : comm_total + rest;
        }
        if (detail::improves(total, best)) {
            best = total;
            best_choice = choice;
        }
        std::size_t pos = M;
        while (pos-- > 0) {
            if (++choice[pos] < rows[pos].size()) break;
            choice[pos] = 0;
        }
        if (pos == static_cast<std::size_t>(-1)) break;
    }

    OptimizationResult res;
    res.plan = empty_plan(p);
    for (std::size_t m = 0; m < M; ++m) {
        res.plan.target[m] = rows[m][best_choice[m]].routes;
        res.plan.power[m] = rows[m][best_choice[m]].powers;
    }
    res.objective = plan_objective(p, res.plan);
    res.iterations = 1;
    return res;
}

/// Rows per MTD above which the offloading step moves one segment at a time.
inline constexpr std::size_t kMaxRowBestResponse = 256;

/// Alternates an offloading step (each MTD in turn switches to its best route
/// row, re-solving its own powers, while the total latency strictly drops)
/// with a power step (allocate_power per MTD for the current rows), starting
/// from the better of the two baselines. The objective never increases.
inline OptimizationResult optimize_alternating(const Process& p, std::size_t max_iterations = 100,
                                               double tolerance = 1e-9) {
    check_process(p);
    Plan plan = state_oriented_baseline(p);
    double obj = plan_objective(p, plan);
    try {
        Plan sat = satellite_only_baseline(p);
        const double v = plan_objective(p, sat);
        if (v < obj) {
            plan = std::move(sat);
            obj = v;
        }
    } catch (const InfeasibleError&) {
    }

    const std::size_t M = p.mtds.size(), K = p.segments();
    OptimizationResult res;
    for (res.iterations = 1; res.iterations <= max_iterations; ++res.iterations) {
        const double before = obj;

        for (std::size_t sweep = 0; sweep < 100; ++sweep) {
            bool changed = false;
            for (std::size_t m = 0; m < M; ++m) {
                const auto R = p.mtds[m].routes.size();
                if (detail::row_count(R, K) <= kMaxRowBestResponse) {
                    std::optional<Plan> best_plan;
                    for (std::size_t code = 0; code < detail::row_count(R, K); ++code) {
                        Plan cand = plan;
                        cand.target[m] = detail::decode_row(code, R, K);
                        if (cand.target[m] == plan.target[m] && plan.power[m] == cand.power[m] &&
                            std::all_of(plan.power[m].begin(), plan.power[m].end(), [](double x) { return x > 0.0; }))
                            continue;
                        allocate_row_power(p, m, cand);
                        const double v = plan_objective(p, cand);
                        if (detail::improves(v, obj)) {
                            obj = v;
                            best_plan = std::move(cand);
                        }
                    }
                    if (best_plan) {
                        plan = std::move(*best_plan);
                        changed = true;
                    }
                } else {
                    for (std::size_t k = 0; k < K; ++k) {
                        const auto current = plan.target[m][k];
                        std::size_t best = current;
                        for (std::size_t r = 0; r < R; ++r) {
                            if (r == current) continue;
                            plan.target[m][k] = r;
                            const double v = plan_objective(p, plan);
                            if (detail::improves(v, obj)) {
                                obj = v;
                                best = r;
                            }
                        }
                        plan.target[m][k] = best;
                        changed = changed || best != current;
                    }
                }
            }
            if (!changed) break;
        }

        Plan powered = plan;
        for (std::size_t m = 0; m < M; ++m) allocate_row_power(p, m, powered);
        const double v = plan_objective(p, powered);
        if (v <= obj) {
            plan = std::move(powered);
            obj = v;
        }
        if (before - obj < tolerance * std::max(1.0, before)) break;
    }
    res.iterations = std::min(res.iterations, max_iterations);
    res.plan = std::move(plan);
    res.objective = obj;
    return res;
}

inline OptimizationResult optimize_process(const Process& p, OptimizerMethod method) {
    return method == OptimizerMethod::Exact ? optimize_exact(p) : optimize_alternating(p);
}

// ---------------------------------------------------------------------------
// Monte Carlo evaluation

struct LatencyStats {
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    std::size_t trials = 0;
};

/// Nearest-rank percentile of an ascending sample.
inline double percentile(std::span<const double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const auto n = sorted.size();
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    idx = std::clamp<std::size_t>(idx, 1, n) - 1;
    return sorted[idx];
}

/// Statistics of the realized total latency (sum over all tasks) per trial.
/// Trial t draws its fading from substream derive_seed(seed, t), hop by hop
/// in MTD, segment, hop order, `coherence_blocks` factors per wireless hop.
/// Without fading every trial equals the predicted objective.
inline LatencyStats evaluate_plan(const Plan& plan, const Process& p, const FadingSpec& fading, std::size_t trials,
                                  std::uint64_t seed) {
    check_process(p);
    const double predicted = plan_objective(p, plan);
    if (fading.kind == FadingKind::None) return {predicted, predicted, predicted, trials};
    if (trials == 0) throw Error("evaluate_plan: need at least one trial");
    if (fading.coherence_blocks == 0) throw Error("evaluate_plan: need at least one coherence block");

    const auto counts = server_counts(p, plan);
    std::vector<double> totals;
    totals.reserve(trials);
    std::vector<std::vector<double>> draws;
    std::vector<std::span<const double>> spans;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        double total = 0.0;
        for (std::size_t m = 0; m < p.mtds.size(); ++m) {
            for (std::size_t k = 0; k < p.segments(); ++k) {
                const auto r = plan.target[m][k];
                const auto& hops = p.mtds[m].hops[k][r];
                draws.assign(hops.size(), {});
                spans.clear();
                for (std::size_t h = 0; h < hops.size(); ++h) {
                    if (!hops[h].wired)
                        for (std::size_t b = 0; b < fading.coherence_blocks; ++b) draws[h].push_back(sample_fading(fading, rng));
                    spans.emplace_back(draws[h]);
                }
                total += task_latency(p, m, k, r, plan.power[m][k], counts[k][p.mtds[m].routes[r].server], spans);
            }
        }
        totals.push_back(total);
    }
    LatencyStats s;
    s.trials = trials;
    for (double v : totals) s.mean += v;
    s.mean /= static_cast<double>(trials);
    std::sort(totals.begin(), totals.end());
    s.p50 = percentile(totals, 0.50);
    s.p95 = percentile(totals, 0.95);
    return s;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_plan_header(std::ostream& os) {
    write_csv_row(os, {"scheme", "mtd", "segment", "target", "power_w", "predicted_latency_s"});
}

inline void write_plan_rows(std::ostream& os, std::string_view scheme, const Process& p, const Plan& plan) {
    const auto lat = task_latencies(p, plan);
    for (std::size_t m = 0; m < p.mtds.size(); ++m)
        for (std::size_t k = 0; k < p.segments(); ++k)
            write_csv_row(os, {std::string(scheme), p.mtds[m].id, std::to_string(k),
                               p.mtds[m].routes[plan.target[m][k]].server_id, format_number(plan.power[m][k]),
                               format_number(lat[m][k])});
}

} // namespace satmec
