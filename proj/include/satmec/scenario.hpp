#pragma once

// Scenario documents (YAML). Layout:
//
//   schema_version: 1
//   network:       structures / shared / nodes / links / tags
//   channel:       models / access_grid / radio_maps
//   case_study:    durations / start / tasks / fading / trials / seed
//   orchestration: fleet / periods
//   placement:     n_satellites / demand / hardening_cost / isl_cost / hop_budget
//
// Every section except schema_version is optional. See scenarios/README.md.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "satmec/channel.hpp"
#include "satmec/core.hpp"
#include "satmec/csv.hpp"
#include "satmec/error.hpp"
#include "satmec/orchestration.hpp"
#include "satmec/process.hpp"
#include "satmec/structures.hpp"

namespace satmec {

inline constexpr int kSchemaVersion = 1;

struct CaseStudySpec {
    std::vector<double> durations;
    double start = 0.0;
    std::vector<ProcessTask> tasks;
    FadingSpec fading{};
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
};

struct OrchestrationSpec {
    FleetSpec fleet{};
    std::vector<DemandSnapshot> periods;
};

struct Scenario {
    int schema_version = kSchemaVersion;
    Topology network;
    ChannelEnvironment channel;
    std::optional<CaseStudySpec> case_study;
    std::optional<OrchestrationSpec> orchestration;
    std::optional<PlacementProblem> placement;
};

namespace yaml {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& msg) { throw ParseError(msg, line_of(n)); }

inline void expect_map(const YAML::Node& n, std::string_view what) {
    if (!n.IsMap()) fail(n, std::string(what) + " must be a mapping");
}

inline void expect_seq(const YAML::Node& n, std::string_view what) {
    if (!n.IsSequence()) fail(n, std::string(what) + " must be a list");
}

/// Rejects keys outside `allowed` so typos do not pass silently.
inline void check_keys(const YAML::Node& n, std::string_view what, std::initializer_list<std::string_view> allowed) {
    expect_map(n, what);
    for (const auto& kv : n) {
        const auto key = kv.first.Scalar();
        bool ok = false;
        for (auto a : allowed) ok = ok || a == key;
        if (!ok) fail(kv.first, "unknown key '" + key + "' in " + std::string(what));
    }
}

inline double to_double(const YAML::Node& n) {
    if (!n.IsScalar()) fail(n, "expected a number");
    const auto& s = n.Scalar();
    if (s == "inf" || s == ".inf" || s == ".Inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) fail(n, "expected a number, got '" + s + "'");
    return v;
}

inline std::uint64_t to_uint(const YAML::Node& n) {
    if (!n.IsScalar()) fail(n, "expected a nonnegative integer");
    const auto& s = n.Scalar();
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(n, "expected a nonnegative integer, got '" + s + "'");
    return v;
}

inline bool to_bool(const YAML::Node& n) {
    if (!n.IsScalar()) fail(n, "expected true or false");
    const auto& s = n.Scalar();
    if (s == "true") return true;
    if (s == "false") return false;
    fail(n, "expected true or false, got '" + s + "'");
}

inline std::string to_str(const YAML::Node& n) {
    if (!n.IsScalar()) fail(n, "expected a string");
    return n.Scalar();
}

inline const YAML::Node require(const YAML::Node& m, const char* key, std::string_view what) {
    const YAML::Node v = m[key];
    if (!v) fail(m, "missing '" + std::string(key) + "' in " + std::string(what));
    return v;
}

inline void opt_double(const YAML::Node& m, const char* key, double& out) {
    if (const YAML::Node v = m[key]) out = to_double(v);
}

inline void opt_size(const YAML::Node& m, const char* key, std::size_t& out) {
    if (const YAML::Node v = m[key]) out = static_cast<std::size_t>(to_uint(v));
}

inline void opt_bool(const YAML::Node& m, const char* key, bool& out) {
    if (const YAML::Node v = m[key]) out = to_bool(v);
}

inline std::vector<double> to_doubles(const YAML::Node& n, std::string_view what) {
    expect_seq(n, what);
    std::vector<double> out;
    for (const auto& v : n) out.push_back(to_double(v));
    return out;
}

/// [x, y] or [x, y, z].
inline Position to_position(const YAML::Node& n) {
    const auto v = to_doubles(n, "position");
    if (v.size() != 2 && v.size() != 3) fail(n, "position needs 2 or 3 coordinates");
    return {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
}

inline LinkKind to_link_kind(const YAML::Node& n) {
    auto k = parse_link_kind(to_str(n));
    if (!k) fail(n, "unknown link kind '" + n.Scalar() + "'");
    return *k;
}

inline MecServer to_server(const YAML::Node& n) {
    check_keys(n, "server", {"capacity", "active_power", "idle_power", "activation", "hardened"});
    MecServer s;
    s.capacity = to_double(require(n, "capacity", "server"));
    opt_double(n, "active_power", s.active_power);
    opt_double(n, "idle_power", s.idle_power);
    opt_double(n, "activation", s.activation);
    opt_bool(n, "hardened", s.hardened);
    return s;
}

inline OrbitDescriptor to_orbit(const YAML::Node& n) {
    check_keys(n, "orbit",
               {"kind", "altitude", "anchor", "direction", "ground_speed", "pass_period", "coverage_radius"});
    OrbitDescriptor o;
    const auto kind = to_str(require(n, "kind", "orbit"));
    if (kind == "geo") o.kind = OrbitKind::Geo;
    else if (kind == "leo-track") o.kind = OrbitKind::LeoTrack;
    else fail(n["kind"], "unknown orbit kind '" + kind + "'");
    o.altitude = to_double(require(n, "altitude", "orbit"));
    if (const YAML::Node a = n["anchor"]) o.anchor = to_position(a);
    if (const YAML::Node d = n["direction"]) {
        const auto v = to_doubles(d, "direction");
        if (v.size() != 2) fail(d, "direction needs 2 components");
        o.direction_x = v[0];
        o.direction_y = v[1];
    }
    opt_double(n, "ground_speed", o.ground_speed);
    opt_double(n, "pass_period", o.pass_period);
    o.coverage_radius = to_double(require(n, "coverage_radius", "orbit"));
    const auto bad = orbit_violations(o);
    if (!bad.empty()) fail(n, bad.front());
    return o;
}

inline Node to_node(const YAML::Node& n) {
    check_keys(n, "node",
               {"id", "kind", "position", "orbit", "server", "max_tx_power", "energy_budget", "relay_power"});
    Node node;
    node.id = to_str(require(n, "id", "node"));
    const YAML::Node kn = require(n, "kind", "node");
    auto kind = parse_node_kind(to_str(kn));
    if (!kind) fail(kn, "unknown node kind '" + kn.Scalar() + "'");
    node.kind = *kind;
    if (const YAML::Node p = n["position"]) node.position = to_position(p);
    if (const YAML::Node o = n["orbit"]) {
        node.orbit = to_orbit(o);
        node.position = {node.orbit->anchor.x, node.orbit->anchor.y, node.orbit->altitude};
        if (const YAML::Node p = n["position"]) node.position = to_position(p);
    }
    if (const YAML::Node s = n["server"]) node.server = to_server(s);
    opt_double(n, "max_tx_power", node.max_tx_power);
    opt_double(n, "energy_budget", node.energy_budget);
    opt_double(n, "relay_power", node.relay_power);
    return node;
}

inline Link to_link(const YAML::Node& n) {
    check_keys(n, "link",
               {"src", "dst", "kind", "bandwidth", "noise_psd", "activation", "fixed_delay", "active_power"});
    Link l;
    l.src = to_str(require(n, "src", "link"));
    l.dst = to_str(require(n, "dst", "link"));
    l.kind = to_link_kind(require(n, "kind", "link"));
    l.bandwidth = to_double(require(n, "bandwidth", "link"));
    l.noise_psd = to_double(require(n, "noise_psd", "link"));
    opt_double(n, "activation", l.activation);
    if (const YAML::Node d = n["fixed_delay"]) l.fixed_prop_delay = to_double(d);
    opt_double(n, "active_power", l.active_power);
    return l;
}

inline StructureSpec to_structure(const YAML::Node& n) {
    check_keys(n, "structure",
               {"kind", "id_prefix", "n_aps", "n_satellites", "n_gateways", "n_mtds", "ap_server", "satellite_server",
                "gateway_server", "cloud_server", "bandwidth", "noise_psd", "mtd_max_power", "mtd_energy_budget",
                "relay_power", "area_radius", "ap_altitude", "satellite_orbit", "satellite_spacing", "gateway_origin",
                "gateway_spacing", "cloud_fiber_delay", "fiber_interconnect", "gateway_fiber_delay",
                "direct_satellite_access"});
    StructureSpec s;
    const YAML::Node kn = require(n, "kind", "structure");
    auto kind = parse_structure_kind(to_str(kn));
    if (!kind) fail(kn, "unknown structure kind '" + kn.Scalar() + "'");
    s.kind = *kind;
    if (const YAML::Node v = n["id_prefix"]) s.id_prefix = to_str(v);
    opt_size(n, "n_aps", s.n_aps);
    opt_size(n, "n_satellites", s.n_satellites);
    opt_size(n, "n_gateways", s.n_gateways);
    opt_size(n, "n_mtds", s.n_mtds);
    if (const YAML::Node v = n["ap_server"]) s.ap_server = to_server(v);
    if (const YAML::Node v = n["satellite_server"]) s.satellite_server = to_server(v);
    if (const YAML::Node v = n["gateway_server"]) s.gateway_server = to_server(v);
    if (const YAML::Node v = n["cloud_server"]) s.cloud_server = to_server(v);
    if (const YAML::Node bw = n["bandwidth"]) {
        expect_map(bw, "bandwidth");
        for (const auto& kv : bw) s.bandwidth[to_link_kind(kv.first)] = to_double(kv.second);
    }
    opt_double(n, "noise_psd", s.noise_psd);
    opt_double(n, "mtd_max_power", s.mtd_max_power);
    opt_double(n, "mtd_energy_budget", s.mtd_energy_budget);
    opt_double(n, "relay_power", s.relay_power);
    opt_double(n, "area_radius", s.area_radius);
    opt_double(n, "ap_altitude", s.ap_altitude);
    if (const YAML::Node v = n["satellite_orbit"]) s.satellite_orbit = to_orbit(v);
    opt_double(n, "satellite_spacing", s.satellite_spacing);
    if (const YAML::Node v = n["gateway_origin"]) s.gateway_origin = to_position(v);
    opt_double(n, "gateway_spacing", s.gateway_spacing);
    opt_double(n, "cloud_fiber_delay", s.cloud_fiber_delay);
    opt_bool(n, "fiber_interconnect", s.fiber_interconnect);
    opt_double(n, "gateway_fiber_delay", s.gateway_fiber_delay);
    opt_bool(n, "direct_satellite_access", s.direct_satellite_access);
    return s;
}

inline Topology to_network(const YAML::Node& n) {
    check_keys(n, "network", {"structures", "shared", "nodes", "links", "tags"});
    std::vector<Topology> parts;
    if (const YAML::Node ss = n["structures"]) {
        expect_seq(ss, "structures");
        for (const auto& s : ss) {
            try {
                parts.push_back(build_structure(to_structure(s)));
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                fail(s, e.what());
            }
        }
    }
    std::vector<NodeId> shared;
    if (const YAML::Node sh = n["shared"]) {
        expect_seq(sh, "shared");
        for (const auto& v : sh) shared.push_back(to_str(v));
    }
    Topology t;
    if (!parts.empty()) {
        try {
            t = compose(parts, shared);
        } catch (const Error& e) {
            fail(n["structures"], e.what());
        }
    }
    if (const YAML::Node ns = n["nodes"]) {
        expect_seq(ns, "nodes");
        for (const auto& v : ns) t.nodes.push_back(to_node(v));
    }
    if (const YAML::Node ls = n["links"]) {
        expect_seq(ls, "links");
        for (const auto& v : ls) t.links.push_back(to_link(v));
    }
    if (const YAML::Node tags = n["tags"]) {
        expect_seq(tags, "tags");
        for (const auto& v : tags) t.structure_tags.push_back(to_str(v));
    }
    return t;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline ChannelEnvironment to_channel(const YAML::Node& n, const std::filesystem::path& base) {
    check_keys(n, "channel", {"models", "access_grid", "radio_maps"});
    ChannelEnvironment env;
    if (const YAML::Node ms = n["models"]) {
        expect_map(ms, "models");
        for (const auto& kv : ms) {
            check_keys(kv.second, "path-loss model", {"g0_db", "d0", "exponent"});
            LogDistanceModel m;
            opt_double(kv.second, "g0_db", m.g0_db);
            opt_double(kv.second, "d0", m.d0);
            opt_double(kv.second, "exponent", m.exponent);
            if (!(m.d0 > 0.0) || !(m.exponent >= 0.0)) fail(kv.second, "path-loss model needs d0 > 0 and exponent >= 0");
            env.models[to_link_kind(kv.first)] = m;
        }
    }
    if (const YAML::Node g = n["access_grid"]) {
        check_keys(g, "access_grid", {"origin", "spacing", "size"});
        GridSpec grid;
        const auto o = to_position(require(g, "origin", "access_grid"));
        grid.origin_x = o.x;
        grid.origin_y = o.y;
        grid.spacing = to_double(require(g, "spacing", "access_grid"));
        const YAML::Node sz = require(g, "size", "access_grid");
        expect_seq(sz, "size");
        if (sz.size() != 2) fail(sz, "size needs [nx, ny]");
        grid.nx = static_cast<std::size_t>(to_uint(sz[0]));
        grid.ny = static_cast<std::size_t>(to_uint(sz[1]));
        try {
            check_grid(grid);
        } catch (const Error& e) {
            fail(g, e.what());
        }
        env.access_grid = grid;
    }
    if (const YAML::Node rm = n["radio_maps"]) {
        expect_map(rm, "radio_maps");
        for (const auto& kv : rm) {
            const auto kind = to_link_kind(kv.first);
            const auto path = resolve(base, to_str(kv.second));
            std::ifstream in(path);
            if (!in) throw IoError("cannot open radio map '" + path.string() + "'");
            try {
                env.static_maps[kind] = read_radio_map(in);
            } catch (const ParseError& e) {
                throw ParseError(path.string() + ": " + e.what(), e.line());
            }
            if (env.static_maps[kind].link_class != kind) fail(kv.second, "radio map class does not match its key");
        }
    }
    return env;
}

inline Task to_task(const YAML::Node& n) {
    Task t;
    t.data_size = to_double(require(n, "data_size", "task"));
    t.cycles = to_double(require(n, "cycles", "task"));
    if (!(t.data_size > 0.0) || !(t.cycles > 0.0)) fail(n, "task needs positive data_size and cycles");
    return t;
}

inline FadingSpec to_fading(const YAML::Node& n) {
    check_keys(n, "fading", {"kind", "k_factor", "coherence_blocks"});
    FadingSpec f;
    const auto kind = to_str(require(n, "kind", "fading"));
    if (kind == "none") f.kind = FadingKind::None;
    else if (kind == "rayleigh") f.kind = FadingKind::Rayleigh;
    else if (kind == "rician") f.kind = FadingKind::Rician;
    else fail(n["kind"], "unknown fading kind '" + kind + "'");
    opt_double(n, "k_factor", f.k_factor);
    opt_size(n, "coherence_blocks", f.coherence_blocks);
    if (f.coherence_blocks == 0) fail(n, "coherence_blocks must be positive");
    if (!(f.k_factor >= 0.0)) fail(n, "k_factor must be nonnegative");
    return f;
}

inline CaseStudySpec to_case_study(const YAML::Node& n, const Topology& net) {
    check_keys(n, "case_study", {"durations", "start", "tasks", "default_task", "fading", "trials", "seed"});
    CaseStudySpec cs;
    cs.durations = to_doubles(require(n, "durations", "case_study"), "durations");
    if (cs.durations.empty()) fail(n["durations"], "need at least one segment");
    for (double d : cs.durations)
        if (!(d > 0.0)) fail(n["durations"], "segment durations must be positive");
    opt_double(n, "start", cs.start);
    if (const YAML::Node ts = n["tasks"]) {
        expect_seq(ts, "tasks");
        for (const auto& t : ts) {
            check_keys(t, "task", {"mtd", "data_size", "cycles"});
            ProcessTask pt{to_str(require(t, "mtd", "task")), to_task(t)};
            const Node* node = net.find(pt.mtd);
            if (!node || node->kind != NodeKind::Mtd) fail(t, "task owner '" + pt.mtd + "' is not an MTD");
            cs.tasks.push_back(std::move(pt));
        }
    } else if (const YAML::Node d = n["default_task"]) {
        check_keys(d, "default_task", {"data_size", "cycles"});
        const Task task = to_task(d);
        for (const auto& node : net.nodes)
            if (node.kind == NodeKind::Mtd) cs.tasks.push_back({node.id, task});
    } else {
        fail(n, "case_study needs tasks or default_task");
    }
    if (const YAML::Node f = n["fading"]) cs.fading = to_fading(f);
    opt_size(n, "trials", cs.trials);
    if (const YAML::Node s = n["seed"]) cs.seed = to_uint(s);
    return cs;
}

inline OrchestrationSpec to_orchestration(const YAML::Node& n, const Topology& net) {
    check_keys(n, "orchestration", {"fleet", "periods"});
    OrchestrationSpec o;
    if (const YAML::Node f = n["fleet"]) {
        check_keys(f, "fleet", {"size", "altitude", "server", "relay_power", "access_bandwidth", "backhaul_bandwidth",
                                "noise_psd", "id_prefix"});
        opt_size(f, "size", o.fleet.size);
        opt_double(f, "altitude", o.fleet.altitude);
        if (const YAML::Node s = f["server"]) o.fleet.server = to_server(s);
        else if (o.fleet.size > 0) fail(f, "fleet needs a server");
        opt_double(f, "relay_power", o.fleet.relay_power);
        opt_double(f, "access_bandwidth", o.fleet.access_bandwidth);
        opt_double(f, "backhaul_bandwidth", o.fleet.backhaul_bandwidth);
        opt_double(f, "noise_psd", o.fleet.noise_psd);
        if (const YAML::Node v = f["id_prefix"]) o.fleet.id_prefix = to_str(v);
    }
    const YAML::Node ps = require(n, "periods", "orchestration");
    expect_seq(ps, "periods");
    std::size_t index = 1;
    for (const auto& p : ps) {
        check_keys(p, "period", {"duration", "demand"});
        DemandSnapshot d;
        d.period = index++;
        d.duration = to_double(require(p, "duration", "period"));
        if (!(d.duration > 0.0)) fail(p, "period duration must be positive");
        if (const YAML::Node ds = p["demand"]) {
            expect_seq(ds, "demand");
            for (const auto& m : ds) {
                check_keys(m, "demand", {"mtd", "data_size", "cycles", "rate", "target"});
                MtdDemand md;
                md.mtd = to_str(require(m, "mtd", "demand"));
                const Node* node = net.find(md.mtd);
                if (!node || node->kind != NodeKind::Mtd) fail(m, "demand owner '" + md.mtd + "' is not an MTD");
                md.task = to_task(m);
                md.task.owner = md.mtd;
                opt_double(m, "rate", md.rate);
                md.target = to_double(require(m, "target", "demand"));
                if (!(md.target > 0.0)) fail(m, "latency target must be positive");
                if (!(md.rate >= 0.0)) fail(m, "rate must be nonnegative");
                d.mtds.push_back(std::move(md));
            }
        }
        o.periods.push_back(std::move(d));
    }
    return o;
}

inline PlacementProblem to_placement(const YAML::Node& n) {
    check_keys(n, "placement", {"n_satellites", "demand", "hardening_cost", "isl_cost", "hop_budget"});
    PlacementProblem p;
    p.n_satellites = static_cast<std::size_t>(to_uint(require(n, "n_satellites", "placement")));
    p.demand = to_doubles(require(n, "demand", "placement"), "demand");
    opt_double(n, "hardening_cost", p.hardening_cost);
    opt_double(n, "isl_cost", p.isl_cost);
    opt_size(n, "hop_budget", p.hop_budget);
    try {
        check_problem(p);
    } catch (const Error& e) {
        fail(n, e.what());
    }
    return p;
}

} // namespace yaml

/// Parses a scenario document. Relative radio-map paths resolve against
/// `base_dir`.
inline Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".") {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
    if (!root || root.IsNull()) throw ParseError("empty scenario document");
    yaml::check_keys(root, "scenario",
                     {"schema_version", "network", "channel", "case_study", "orchestration", "placement"});
    Scenario s;
    const YAML::Node v = root["schema_version"];
    if (!v) yaml::fail(root, "missing schema_version");
    s.schema_version = static_cast<int>(yaml::to_uint(v));
    if (s.schema_version != kSchemaVersion)
        yaml::fail(v, "unsupported schema_version " + std::to_string(s.schema_version));
    if (const YAML::Node n = root["network"]) s.network = yaml::to_network(n);
    if (const YAML::Node n = root["channel"]) s.channel = yaml::to_channel(n, base_dir);
    if (const YAML::Node n = root["case_study"]) s.case_study = yaml::to_case_study(n, s.network);
    if (const YAML::Node n = root["orchestration"]) s.orchestration = yaml::to_orchestration(n, s.network);
    if (const YAML::Node n = root["placement"]) s.placement = yaml::to_placement(n);
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Serialization of the network section

namespace yaml {

inline void emit_number(YAML::Emitter& e, double v) { e << format_number(v); }

inline void emit_position(YAML::Emitter& e, const Position& p) {
    e << YAML::Flow << YAML::BeginSeq;
    emit_number(e, p.x);
    emit_number(e, p.y);
    emit_number(e, p.z);
    e << YAML::EndSeq;
}

inline void emit_server(YAML::Emitter& e, const MecServer& s) {
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "capacity" << YAML::Value;
    emit_number(e, s.capacity);
    e << YAML::Key << "active_power" << YAML::Value;
    emit_number(e, s.active_power);
    e << YAML::Key << "idle_power" << YAML::Value;
    emit_number(e, s.idle_power);
    e << YAML::Key << "activation" << YAML::Value;
    emit_number(e, s.activation);
    e << YAML::Key << "hardened" << YAML::Value << (s.hardened ? "true" : "false");
    e << YAML::EndMap;
}

inline void emit_orbit(YAML::Emitter& e, const OrbitDescriptor& o) {
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << (o.kind == OrbitKind::Geo ? "geo" : "leo-track");
    e << YAML::Key << "altitude" << YAML::Value;
    emit_number(e, o.altitude);
    e << YAML::Key << "anchor" << YAML::Value;
    emit_position(e, o.anchor);
    e << YAML::Key << "direction" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    emit_number(e, o.direction_x);
    emit_number(e, o.direction_y);
    e << YAML::EndSeq;
    e << YAML::Key << "ground_speed" << YAML::Value;
    emit_number(e, o.ground_speed);
    e << YAML::Key << "pass_period" << YAML::Value;
    emit_number(e, o.pass_period);
    e << YAML::Key << "coverage_radius" << YAML::Value;
    emit_number(e, o.coverage_radius);
    e << YAML::EndMap;
}

} // namespace yaml

/// A scenario document holding only `t`, with every node and link spelled
/// out. parse_scenario(serialize_topology(t)).network == t.
inline std::string serialize_topology(const Topology& t) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "schema_version" << YAML::Value << kSchemaVersion;
    e << YAML::Key << "network" << YAML::Value << YAML::BeginMap;

    e << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : t.nodes) {
        e << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << n.id;
        e << YAML::Key << "kind" << YAML::Value << std::string(to_string(n.kind));
        e << YAML::Key << "position" << YAML::Value;
        yaml::emit_position(e, n.position);
        if (n.orbit) {
            e << YAML::Key << "orbit" << YAML::Value;
            yaml::emit_orbit(e, *n.orbit);
        }
        if (n.server) {
            e << YAML::Key << "server" << YAML::Value;
            yaml::emit_server(e, *n.server);
        }
        e << YAML::Key << "max_tx_power" << YAML::Value;
        yaml::emit_number(e, n.max_tx_power);
        e << YAML::Key << "energy_budget" << YAML::Value;
        yaml::emit_number(e, n.energy_budget);
        e << YAML::Key << "relay_power" << YAML::Value;
        yaml::emit_number(e, n.relay_power);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : t.links) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "src" << YAML::Value << YAML::DoubleQuoted << l.src;
        e << YAML::Key << "dst" << YAML::Value << YAML::DoubleQuoted << l.dst;
        e << YAML::Key << "kind" << YAML::Value << std::string(to_string(l.kind));
        e << YAML::Key << "bandwidth" << YAML::Value;
        yaml::emit_number(e, l.bandwidth);
        e << YAML::Key << "noise_psd" << YAML::Value;
        yaml::emit_number(e, l.noise_psd);
        e << YAML::Key << "activation" << YAML::Value;
        yaml::emit_number(e, l.activation);
        if (l.fixed_prop_delay) {
            e << YAML::Key << "fixed_delay" << YAML::Value;
            yaml::emit_number(e, *l.fixed_prop_delay);
        }
        e << YAML::Key << "active_power" << YAML::Value;
        yaml::emit_number(e, l.active_power);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    if (!t.structure_tags.empty()) {
        e << YAML::Key << "tags" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& tag : t.structure_tags) e << YAML::DoubleQuoted << tag;
        e << YAML::EndSeq;
    }
    e << YAML::EndMap << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

} // namespace satmec
