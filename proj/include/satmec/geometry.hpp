#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "satmec/error.hpp"
#include "satmec/rng.hpp"

namespace satmec {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s

/// Cartesian ground frame in metres, z is altitude.
struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

inline bool is_valid(const Position& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && p.z >= 0.0;
}

inline double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

inline double ground_distance_sq(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double propagation_delay(const Position& a, const Position& b) {
    return distance(a, b) / kSpeedOfLight;
}

enum class OrbitKind { Geo, LeoTrack };

/// Flat-earth orbit abstraction. A GEO satellite hangs above `anchor`; a
/// LEO-track satellite's sub-point moves from `anchor` along `direction` at
/// `ground_speed` and wraps back to `anchor` every `pass_period` seconds.
struct OrbitDescriptor {
    OrbitKind kind = OrbitKind::Geo;
    double altitude = 0.0;
    Position anchor{};
    double direction_x = 1.0;
    double direction_y = 0.0;
    double ground_speed = 0.0;
    double pass_period = 0.0;
    double coverage_radius = 0.0;

    friend bool operator==(const OrbitDescriptor&, const OrbitDescriptor&) = default;
};

inline std::vector<std::string> orbit_violations(const OrbitDescriptor& o) {
    std::vector<std::string> out;
    if (!(o.altitude > 0.0)) out.emplace_back("nonpositive orbit altitude");
    if (!(o.coverage_radius > 0.0)) out.emplace_back("nonpositive coverage radius");
    if (o.kind == OrbitKind::LeoTrack) {
        if (!(o.pass_period > 0.0)) out.emplace_back("nonpositive pass period");
        if (!(o.ground_speed > 0.0)) out.emplace_back("nonpositive ground speed");
        if (!(std::hypot(o.direction_x, o.direction_y) > 0.0)) out.emplace_back("zero track direction");
    }
    return out;
}

namespace detail {

struct UnitDirection {
    double x;
    double y;
};

inline UnitDirection unit_direction(const OrbitDescriptor& o) {
    const double n = std::hypot(o.direction_x, o.direction_y);
    return {o.direction_x / n, o.direction_y / n};
}

} // namespace detail

inline Position satellite_position(const OrbitDescriptor& orbit, double t) {
    if (t < 0.0) throw Error("satellite_position: negative time");
    if (orbit.kind == OrbitKind::Geo) return {orbit.anchor.x, orbit.anchor.y, orbit.altitude};
    const auto dir = detail::unit_direction(orbit);
    const double s = orbit.ground_speed * std::fmod(t, orbit.pass_period);
    return {orbit.anchor.x + dir.x * s, orbit.anchor.y + dir.y * s, orbit.altitude};
}

struct VisibilityWindow {
    double start = 0.0;
    double end = 0.0;

    friend bool operator==(const VisibilityWindow&, const VisibilityWindow&) = default;
};

/// Joins windows whose gap is within rounding of zero. Input must be sorted.
inline std::vector<VisibilityWindow> merge_windows(std::vector<VisibilityWindow> w) {
    std::vector<VisibilityWindow> out;
    for (const auto& win : w) {
        if (!out.empty() && win.start <= out.back().end + 1e-9 * std::max(1.0, std::abs(out.back().end))) {
            out.back().end = std::max(out.back().end, win.end);
        } else {
            out.push_back(win);
        }
    }
    return out;
}

/// Intervals of [t0, t1] during which the ground-projected distance between
/// the satellite sub-point and `ground` is within the coverage radius.
inline std::vector<VisibilityWindow> visibility_windows(const OrbitDescriptor& orbit, const Position& ground,
                                                        double t0, double t1) {
    if (!(t1 > t0)) throw Error("visibility_windows: empty horizon");
    const double r2 = orbit.coverage_radius * orbit.coverage_radius;
    if (orbit.kind == OrbitKind::Geo) {
        if (ground_distance_sq(orbit.anchor, ground) <= r2) return {{t0, t1}};
        return {};
    }

    const auto dir = detail::unit_direction(orbit);
    const double rel_x = ground.x - orbit.anchor.x;
    const double rel_y = ground.y - orbit.anchor.y;
    const double along = rel_x * dir.x + rel_y * dir.y;
    const double across = rel_x * dir.y - rel_y * dir.x;
    if (across * across > r2) return {};
    const double half_chord = std::sqrt(r2 - across * across);
    const double track_len = orbit.ground_speed * orbit.pass_period;
    const double s_lo = std::max(0.0, along - half_chord);
    const double s_hi = std::min(track_len, along + half_chord);
    if (!(s_hi > s_lo)) return {};

    std::vector<VisibilityWindow> raw;
    const auto first = static_cast<long long>(std::floor(t0 / orbit.pass_period));
    const auto last = static_cast<long long>(std::ceil(t1 / orbit.pass_period));
    for (long long n = first; n <= last; ++n) {
        const double base = static_cast<double>(n) * orbit.pass_period;
        const double start = std::max(t0, base + s_lo / orbit.ground_speed);
        const double end = std::min(t1, base + s_hi / orbit.ground_speed);
        if (end > start) raw.push_back({start, end});
    }
    return merge_windows(std::move(raw));
}

inline constexpr std::uint64_t kPlacementSeed = 0x5A7E'11C0'FFEEull;

struct ClusterResult {
    std::vector<Position> centers;        // ground centroids, z = 0
    std::vector<std::size_t> assignment;  // point index -> center index
    std::vector<double> objective_trace;  // sum of squared ground distances, one entry per step
};

namespace detail {

inline std::size_t nearest_center(const Position& p, std::span<const Position> centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = ground_distance_sq(p, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

inline double cluster_objective(std::span<const Position> pts, std::span<const Position> centers,
                                std::span<const std::size_t> assign) {
    double j = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) j += ground_distance_sq(pts[i], centers[assign[i]]);
    return j;
}

inline void recompute_centers(std::span<const Position> pts, std::span<const std::size_t> assign,
                              std::vector<Position>& centers) {
    std::vector<double> sx(centers.size(), 0.0), sy(centers.size(), 0.0);
    std::vector<std::size_t> count(centers.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sx[assign[i]] += pts[i].x;
        sy[assign[i]] += pts[i].y;
        ++count[assign[i]];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (count[c] == 0) continue; // empty cluster keeps its center
        centers[c] = {sx[c] / static_cast<double>(count[c]), sy[c] / static_cast<double>(count[c]), 0.0};
    }
}

} // namespace detail

/// Farthest-point seeding, Lloyd iterations, then single-point transfer
/// passes that escape Lloyd fixed points. Each recorded objective is no larger
/// than the previous one.
inline ClusterResult lloyd_cluster(std::span<const Position> points, std::size_t k,
                                   std::uint64_t seed = kPlacementSeed, int max_iter = 100) {
    if (points.empty() || k == 0 || k > points.size()) throw Error("lloyd_cluster: need 1 <= k <= points");
    const std::size_t n = points.size();

    ClusterResult res;
    std::vector<std::size_t> seeds{static_cast<std::size_t>(splitmix64(seed) % n)};
    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    while (seeds.size() < k) {
        const auto& last = points[seeds.back()];
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            min_d[i] = std::min(min_d[i], ground_distance_sq(points[i], last));
            if (min_d[i] > far_d) {
                far_d = min_d[i];
                far = i;
            }
        }
        seeds.push_back(far);
    }
    for (auto s : seeds) res.centers.push_back({points[s].x, points[s].y, 0.0});

    res.assignment.assign(n, 0);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = it == 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = detail::nearest_center(points[i], res.centers);
            if (c != res.assignment[i]) {
                res.assignment[i] = c;
                changed = true;
            }
        }
        res.objective_trace.push_back(detail::cluster_objective(points, res.centers, res.assignment));
        if (!changed) break;
        detail::recompute_centers(points, res.assignment, res.centers);
        res.objective_trace.push_back(detail::cluster_objective(points, res.centers, res.assignment));
    }

    std::vector<std::size_t> size(k, 0);
    for (auto a : res.assignment) ++size[a];
    for (int pass = 0; pass < max_iter; ++pass) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto from = res.assignment[i];
            if (size[from] <= 1) continue;
            const double nf = static_cast<double>(size[from]);
            const double remove_gain = nf / (nf - 1.0) * ground_distance_sq(points[i], res.centers[from]);
            std::size_t best_to = from;
            double best_delta = -1e-12 * std::max(1.0, res.objective_trace.back());
            for (std::size_t to = 0; to < k; ++to) {
                if (to == from) continue;
                const double nt = static_cast<double>(size[to]);
                const double delta = nt / (nt + 1.0) * ground_distance_sq(points[i], res.centers[to]) - remove_gain;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_to = to;
                }
            }
            if (best_to == from) continue;
            res.assignment[i] = best_to;
            --size[from];
            ++size[best_to];
            detail::recompute_centers(points, res.assignment, res.centers);
            res.objective_trace.push_back(detail::cluster_objective(points, res.centers, res.assignment));
            moved = true;
        }
        if (!moved) break;
    }
    return res;
}

/// UAV hover positions at `altitude` covering the MTD ground positions.
/// With at least as many UAVs as MTDs every MTD gets one overhead and the
/// surplus hovers over the global centroid.
inline std::vector<Position> place_uavs(std::span<const Position> mtds, std::size_t n, double altitude) {
    if (n == 0) throw Error("place_uavs: need at least one UAV");
    if (mtds.empty()) throw Error("place_uavs: need at least one MTD");
    std::vector<Position> out;
    if (n >= mtds.size()) {
        double cx = 0.0, cy = 0.0;
        for (const auto& p : mtds) {
            out.push_back({p.x, p.y, altitude});
            cx += p.x;
            cy += p.y;
        }
        const double m = static_cast<double>(mtds.size());
        while (out.size() < n) out.push_back({cx / m, cy / m, altitude});
        return out;
    }
    auto res = lloyd_cluster(mtds, n);
    for (const auto& c : res.centers) out.push_back({c.x, c.y, altitude});
    return out;
}

/// Index of the closest UAV (3-D distance) for every MTD; ties go to the
/// lower index.
inline std::vector<std::size_t> nearest_association(std::span<const Position> mtds, std::span<const Position> uavs) {
    if (uavs.empty()) throw Error("nearest_association: no UAVs");
    std::vector<std::size_t> out;
    out.reserve(mtds.size());
    for (const auto& m : mtds) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < uavs.size(); ++u) {
            const double d = distance(m, uavs[u]);
            if (d < best_d) {
                best_d = d;
                best = u;
            }
        }
        out.push_back(best);
    }
    return out;
}

} // namespace satmec
