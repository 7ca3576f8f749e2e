#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "satmec/core.hpp"
#include "satmec/csv.hpp"
#include "satmec/error.hpp"
#include "satmec/geometry.hpp"
#include "satmec/rng.hpp"

namespace satmec {

// ---------------------------------------------------------------------------
// Rates

/// Shannon rate in bit/s for transmit power `p_tx` (W) over a link with
/// linear large-scale gain `gain`.
inline double link_rate(double p_tx, double gain, double bandwidth, double noise_psd) {
    if (p_tx < 0.0) throw Error("link_rate: negative power");
    const double snr = p_tx * gain / (noise_psd * bandwidth);
    return bandwidth * std::log1p(snr) / std::numbers::ln2;
}

inline double link_rate(double p_tx, double gain, const Link& link) {
    return link_rate(p_tx, gain, link.bandwidth, link.noise_psd);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// ---------------------------------------------------------------------------
// Large-scale gain

struct LogDistanceModel {
    double g0_db = 0.0;    // gain at the reference distance
    double d0 = 1.0;       // reference distance, m
    double exponent = 2.0; // path-loss exponent

    friend bool operator==(const LogDistanceModel&, const LogDistanceModel&) = default;
};

/// Distances below `d0` are clamped to `d0`.
inline double log_distance_gain_db(const LogDistanceModel& m, double dist) {
    return m.g0_db - 10.0 * m.exponent * std::log10(std::max(dist, m.d0) / m.d0);
}

struct GridSpec {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double spacing = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 0;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Large-scale gain (dB) on a ground lattice, row-major with y as the row.
struct RadioMap {
    GridSpec grid;
    LinkKind link_class = LinkKind::UserAccess;
    double epoch = 0.0;
    std::vector<double> values_db;

    double at(std::size_t ix, std::size_t iy) const { return values_db[iy * grid.nx + ix]; }

    friend bool operator==(const RadioMap&, const RadioMap&) = default;
};

inline void check_grid(const GridSpec& g) {
    if (!(g.spacing > 0.0) || g.nx < 2 || g.ny < 2 || !std::isfinite(g.origin_x) || !std::isfinite(g.origin_y))
        throw Error("radio map grid degenerate: need spacing > 0 and at least 2x2 points");
}

/// Radio map of a transmitter at `tx`; each lattice point sits on the ground.
inline RadioMap build_radio_map(const LogDistanceModel& model, const GridSpec& grid, const Position& tx,
                                LinkKind link_class = LinkKind::UserAccess, double epoch = 0.0) {
    check_grid(grid);
    if (!(model.d0 > 0.0) || !(model.exponent >= 0.0)) throw Error("build_radio_map: need d0 > 0 and exponent >= 0");
    RadioMap map{grid, link_class, epoch, {}};
    map.values_db.reserve(grid.nx * grid.ny);
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
        for (std::size_t ix = 0; ix < grid.nx; ++ix) {
            const Position u{grid.origin_x + static_cast<double>(ix) * grid.spacing,
                             grid.origin_y + static_cast<double>(iy) * grid.spacing, 0.0};
            map.values_db.push_back(log_distance_gain_db(model, distance(u, tx)));
        }
    }
    return map;
}

/// Bilinear interpolation in dB; points outside the lattice clamp to its edge.
inline double lookup_db(const RadioMap& map, const Position& p) {
    const auto& g = map.grid;
    auto axis = [&](double coord, double origin, std::size_t n, std::size_t& cell, double& frac) {
        double u = (coord - origin) / g.spacing;
        u = std::clamp(u, 0.0, static_cast<double>(n - 1));
        cell = std::min(static_cast<std::size_t>(u), n - 2);
        frac = u - static_cast<double>(cell);
    };
    std::size_t ix, iy;
    double fx, fy;
    axis(p.x, g.origin_x, g.nx, ix, fx);
    axis(p.y, g.origin_y, g.ny, iy, fy);
    return (1.0 - fx) * (1.0 - fy) * map.at(ix, iy) + fx * (1.0 - fy) * map.at(ix + 1, iy) +
           (1.0 - fx) * fy * map.at(ix, iy + 1) + fx * fy * map.at(ix + 1, iy + 1);
}

inline double lookup_gain(const RadioMap& map, const Position& p) { return db_to_linear(lookup_db(map, p)); }

// ---------------------------------------------------------------------------
// Radio map files
//
//   # comment
//   link_class user-access
//   origin 0 0
//   spacing 100
//   size 3 2          (nx ny)
//   epoch 0
//   values
//   <ny rows of nx dB values>

inline void write_radio_map(std::ostream& os, const RadioMap& map) {
    os << "link_class " << to_string(map.link_class) << '\n';
    os << "origin " << format_number(map.grid.origin_x) << ' ' << format_number(map.grid.origin_y) << '\n';
    os << "spacing " << format_number(map.grid.spacing) << '\n';
    os << "size " << map.grid.nx << ' ' << map.grid.ny << '\n';
    os << "epoch " << format_number(map.epoch) << '\n';
    os << "values\n";
    for (std::size_t iy = 0; iy < map.grid.ny; ++iy) {
        for (std::size_t ix = 0; ix < map.grid.nx; ++ix) {
            if (ix) os << ' ';
            os << format_number(map.at(ix, iy));
        }
        os << '\n';
    }
}

inline RadioMap read_radio_map(std::istream& is) {
    RadioMap map;
    bool have_class = false, have_origin = false, have_spacing = false, have_size = false;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> ParseError { return ParseError("radio map: " + msg, lineno); };

    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key.front() == '#') continue;
        if (key == "link_class") {
            std::string v;
            ls >> v;
            auto k = parse_link_kind(v);
            if (!k) throw fail("unknown link class '" + v + "'");
            map.link_class = *k;
            have_class = true;
        } else if (key == "origin") {
            if (!(ls >> map.grid.origin_x >> map.grid.origin_y)) throw fail("bad origin");
            have_origin = true;
        } else if (key == "spacing") {
            if (!(ls >> map.grid.spacing)) throw fail("bad spacing");
            have_spacing = true;
        } else if (key == "size") {
            if (!(ls >> map.grid.nx >> map.grid.ny)) throw fail("bad size");
            have_size = true;
        } else if (key == "epoch") {
            if (!(ls >> map.epoch)) throw fail("bad epoch");
        } else if (key == "values") {
            if (!(have_class && have_origin && have_spacing && have_size)) throw fail("header incomplete before values");
            try {
                check_grid(map.grid);
            } catch (const Error& e) {
                throw fail(e.what());
            }
            for (std::size_t iy = 0; iy < map.grid.ny; ++iy) {
                if (!std::getline(is, line)) throw fail("missing value rows");
                ++lineno;
                std::istringstream row(line);
                for (std::size_t ix = 0; ix < map.grid.nx; ++ix) {
                    double v;
                    if (!(row >> v) || !std::isfinite(v)) throw fail("expected " + std::to_string(map.grid.nx) + " finite values");
                    map.values_db.push_back(v);
                }
            }
            return map;
        } else {
            throw fail("unknown key '" + key + "'");
        }
    }
    throw fail("missing values section");
}

// ---------------------------------------------------------------------------
// Small-scale fading

enum class FadingKind { None, Rayleigh, Rician };

/// Unit-mean power fading. A transmission spans `coherence_blocks`
/// independent blocks and sees their average Shannon rate.
struct FadingSpec {
    FadingKind kind = FadingKind::None;
    double k_factor = 0.0; // Rician only, linear; +inf gives no fading
    std::size_t coherence_blocks = 8;

    friend bool operator==(const FadingSpec&, const FadingSpec&) = default;
};

inline double sample_fading(const FadingSpec& spec, Rng& rng) {
    switch (spec.kind) {
    case FadingKind::None: return 1.0;
    case FadingKind::Rayleigh: return rng.exponential();
    case FadingKind::Rician: {
        if (std::isinf(spec.k_factor)) return 1.0;
        const double los = std::sqrt(spec.k_factor / (spec.k_factor + 1.0));
        const double sigma = std::sqrt(0.5 / (spec.k_factor + 1.0));
        const double re = los + sigma * rng.normal();
        const double im = sigma * rng.normal();
        return re * re + im * im;
    }
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Channel environment: per-class path loss plus optional radio maps

struct ChannelEnvironment {
    std::map<LinkKind, LogDistanceModel> models;
    /// Lattice for radio maps built around each access receiver; MTD uplink
    /// gains are read from these maps when set.
    std::optional<GridSpec> access_grid;
    /// Pre-established maps keyed by link class; they take precedence.
    std::map<LinkKind, RadioMap> static_maps;

    const LogDistanceModel& model(LinkKind k) const {
        auto it = models.find(k);
        if (it == models.end()) throw Error("no path-loss model for link class " + std::string(to_string(k)));
        return it->second;
    }

    /// Linear large-scale gain of a hop of class `kind` from `tx` to `rx`.
    /// `ground_user` marks a hop transmitted by an MTD.
    double gain(LinkKind kind, const Position& tx, const Position& rx, bool ground_user) const {
        if (ground_user) {
            if (auto it = static_maps.find(kind); it != static_maps.end()) return lookup_gain(it->second, tx);
            if (access_grid) return lookup_gain(build_radio_map(model(kind), *access_grid, rx, kind), tx);
        }
        return db_to_linear(log_distance_gain_db(model(kind), distance(tx, rx)));
    }
};

} // namespace satmec
