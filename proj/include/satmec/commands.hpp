#pragma once

// Command drivers behind the satmec executable. Each returns the process
// exit status: 0 success, 1 domain violation or infeasibility, 2 I/O or
// parse failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "satmec/csv.hpp"
#include "satmec/error.hpp"
#include "satmec/optimizer.hpp"
#include "satmec/orchestration.hpp"
#include "satmec/process.hpp"
#include "satmec/scenario.hpp"
#include "satmec/structures.hpp"

namespace satmec {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitIo = 2 };

struct RunConfig {
    std::string command;
    std::filesystem::path scenario;
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string method; // empty means the command default
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw IoError("cannot write '" + (dir / name).string() + "'");
    return os;
}

inline void close_output(std::ofstream& os, const std::filesystem::path& path) {
    os.close();
    if (!os) throw IoError("failed writing '" + path.string() + "'");
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitIo;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitDomain;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}

} // namespace detail

inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto s = load_scenario(cfg.scenario);
        const auto violations = validate_topology(s.network);
        for (const auto& v : violations) out << "violation: " << v << '\n';
        if (!violations.empty()) return int(kExitDomain);
        out << "ok: " << s.network.nodes.size() << " nodes, " << s.network.links.size() << " links\n";
        return int(kExitOk);
    });
}

/// Scheme comparison on the scenario's case study. Writes case_study.csv
/// (one row per scheme) and plans.csv.
inline int cmd_case_study(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto s = load_scenario(cfg.scenario);
        if (!s.case_study) throw Error("scenario has no case_study section");
        const auto bad = validate_topology(s.network);
        if (!bad.empty()) throw Error("network fails validation: " + bad.front());
        const auto& cs = *s.case_study;
        const std::string method = cfg.method.empty() ? "all" : cfg.method;
        if (method != "all" && method != "exact" && method != "alternating")
            throw Error("case-study: --method must be exact, alternating or all");
        const std::size_t trials = cfg.trials.value_or(cs.trials);
        const std::uint64_t seed = cfg.seed.value_or(cs.seed);

        const Process proc = build_process(s.network, s.channel, cs.tasks, cs.durations, cs.start);
        check_process(proc);

        struct Row {
            std::string scheme;
            Plan plan;
        };
        std::vector<Row> rows;
        if (method != "alternating") {
            if (assignment_count(proc) <= kMaxExactAssignments) rows.push_back({"exact", optimize_exact(proc).plan});
            else err << "warning: exact skipped, more than " << kMaxExactAssignments << " offloading assignments\n";
        }
        if (method != "exact") rows.push_back({"alternating", optimize_alternating(proc).plan});
        rows.push_back({"state-oriented", state_oriented_baseline(proc)});
        try {
            rows.push_back({"satellite-only", satellite_only_baseline(proc)});
        } catch (const InfeasibleError& e) {
            err << "warning: satellite-only skipped: " << e.what() << '\n';
        }

        auto os = detail::open_output(cfg.out, "case_study.csv");
        write_csv_row(os, {"scheme", "predicted_s", "realized_mean_s", "realized_p50_s", "realized_p95_s", "trials"});
        std::vector<double> predicted;
        for (const auto& r : rows) {
            if (!plan_feasible(proc, r.plan)) throw Error("internal: infeasible plan from " + r.scheme);
            const double pred = plan_objective(proc, r.plan);
            predicted.push_back(pred);
            if (trials == 0) {
                write_csv_row(os, {r.scheme, format_number(pred), "", "", "", "0"});
            } else {
                const auto st = evaluate_plan(r.plan, proc, cs.fading, trials, seed);
                write_csv_row(os, {r.scheme, format_number(pred), format_number(st.mean), format_number(st.p50),
                                   format_number(st.p95), std::to_string(trials)});
            }
            out << r.scheme << ": predicted " << format_number(pred) << " s\n";
        }
        detail::close_output(os, cfg.out / "case_study.csv");

        auto ps = detail::open_output(cfg.out, "plans.csv");
        write_plan_header(ps);
        for (const auto& r : rows) write_plan_rows(ps, r.scheme, proc, r.plan);
        detail::close_output(ps, cfg.out / "plans.csv");

        // Rows run exact, alternating, baselines; a proposed scheme must not
        // lose to any row after it.
        auto proposed = [](const std::string& s) { return s == "exact" || s == "alternating"; };
        bool ordered = true;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = i + 1; j < rows.size(); ++j)
                if (proposed(rows[i].scheme) && predicted[i] > predicted[j] * (1.0 + 1e-9)) ordered = false;
        out << "ordering (proposed <= baselines): " << (ordered ? "holds" : "VIOLATED") << '\n';
        return int(ordered ? kExitOk : kExitDomain);
    });
}

/// Writes timeline.csv (on-demand) and timeline_always_on.csv.
inline int cmd_orchestrate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto s = load_scenario(cfg.scenario);
        if (!s.orchestration || s.orchestration->periods.empty()) throw Error("scenario defines no periods");
        const auto& o = *s.orchestration;
        const OrchestrationContext ctx{s.network, s.channel, o.fleet};
        const GreedyActivationPolicy policy;
        const auto tl = run_orchestration(o.periods, ctx, policy);

        auto os = detail::open_output(cfg.out, "timeline.csv");
        write_timeline_header(os);
        write_timeline_rows(os, s.network, tl.on_demand);
        detail::close_output(os, cfg.out / "timeline.csv");
        auto ao = detail::open_output(cfg.out, "timeline_always_on.csv");
        write_timeline_header(ao);
        write_timeline_rows(ao, s.network, tl.always_on);
        detail::close_output(ao, cfg.out / "timeline_always_on.csv");

        out << "on-demand energy: " << format_number(OrchestrationTimeline::energy(tl.on_demand)) << " J\n";
        out << "always-on energy: " << format_number(OrchestrationTimeline::energy(tl.always_on)) << " J\n";
        out << "energy savings: " << format_number(energy_savings_percent(tl)) << " %\n";
        return int(kExitOk);
    });
}

/// Satellite subset as "sat0;sat2".
inline std::string format_subset(const std::vector<std::size_t>& servers) {
    std::vector<std::string> parts;
    for (auto s : servers) parts.push_back("sat" + std::to_string(s));
    return join(parts);
}

/// Writes placement.csv with one row per requested method.
inline int cmd_placement(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto s = load_scenario(cfg.scenario);
        if (!s.placement) throw Error("scenario has no placement section");
        const std::string method = cfg.method.empty() ? "both" : cfg.method;
        std::vector<PlacementMethod> methods;
        if (method == "exhaustive" || method == "both") methods.push_back(PlacementMethod::Exhaustive);
        if (method == "greedy" || method == "both") methods.push_back(PlacementMethod::Greedy);
        if (methods.empty()) throw Error("placement: --method must be exhaustive, greedy or both");

        std::vector<PlacementResult> results;
        for (auto m : methods) results.push_back(optimize_placement(*s.placement, m));
        auto os = detail::open_output(cfg.out, "placement.csv");
        write_csv_row(os, {"subset", "cost", "method"});
        for (const auto& r : results) {
            write_csv_row(os, {format_subset(r.servers), format_number(r.cost), std::string(to_string(r.method))});
            out << to_string(r.method) << ": {" << format_subset(r.servers) << "} cost " << format_number(r.cost) << '\n';
        }
        detail::close_output(os, cfg.out / "placement.csv");
        return int(kExitOk);
    });
}

inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.command == "validate") return cmd_validate(cfg, out, err);
    if (cfg.command == "case-study") return cmd_case_study(cfg, out, err);
    if (cfg.command == "orchestrate") return cmd_orchestrate(cfg, out, err);
    if (cfg.command == "placement") return cmd_placement(cfg, out, err);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitDomain;
}

} // namespace satmec
