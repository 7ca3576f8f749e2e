// Acceptance suite: one test suite per criterion, one PASS/FAIL line each.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "satmec/channel.hpp"
#include "satmec/geometry.hpp"
#include "satmec/latency.hpp"
#include "satmec/optimizer.hpp"
#include "satmec/orchestration.hpp"
#include "satmec/scenario.hpp"
#include "satmec/structures.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace satmec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string scenario_path(const char* name) { return std::string(SATMEC_SOURCE_DIR) + "/scenarios/" + name; }

/// The 200 random optimizer instances: every (M, K) in {1,2,3}^2 in turn.
struct Instance {
    std::uint64_t seed;
    std::size_t M, K;
};

std::vector<Instance> instances() {
    std::vector<Instance> out;
    for (std::uint64_t i = 0; i < 200; ++i) out.push_back({1000 + i, 1 + i % 3, 1 + (i / 3) % 3});
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

TEST(Criterion1_OracleEquivalence, ExactMatchesGridAndAlternatingTracksExact) {
    const auto t0 = Clock::now();
    double solver_s = 0.0;
    int alt_close = 0, n = 0;
    for (const auto& in : instances()) {
        const auto p = testsupport::random_process(in.seed, in.M, in.K);
        const auto ts = Clock::now();
        const auto ex = optimize_exact(p);
        const auto alt = optimize_alternating(p);
        solver_s += seconds_since(ts);
        const double oracle = testsupport::grid_oracle(p, 1e-3);
        ++n;
        EXPECT_LE(std::abs(ex.objective - oracle), 1e-3 * oracle) << "seed " << in.seed;
        // The grid only restricts the search, so it can never beat the exact optimum.
        EXPECT_LE(ex.objective, oracle * (1 + 1e-12)) << "seed " << in.seed;
        EXPECT_GE(alt.objective, ex.objective * (1 - 1e-9)) << "seed " << in.seed;
        if (alt.objective <= ex.objective * (1 + 1e-2)) ++alt_close;
    }
    EXPECT_GE(alt_close, static_cast<int>(std::ceil(0.95 * n)));
    const double total = seconds_since(t0);
    std::printf("  %d instances, alternating within 1%%: %d, solver %.2f s, with oracle %.2f s\n", n, alt_close, solver_s,
                total);
    EXPECT_LT(total, 120.0);
}

// ---------------------------------------------------------------------------

TEST(Criterion2_SchemeOrdering, ExactNeverWorseThanBaselines) {
    for (const auto& in : instances()) {
        const auto p = testsupport::random_process(in.seed, in.M, in.K);
        const double ex = optimize_exact(p).objective;
        EXPECT_LE(ex, plan_objective(p, state_oriented_baseline(p)) * (1 + 1e-12)) << "seed " << in.seed;
        EXPECT_LE(ex, plan_objective(p, satellite_only_baseline(p)) * (1 + 1e-12)) << "seed " << in.seed;
    }
}

TEST(Criterion2_SchemeOrdering, BundledCaseStudyGaps) {
    const auto s = load_scenario(scenario_path("case_study.yaml"));
    ASSERT_TRUE(s.case_study);
    const auto& cs = *s.case_study;
    const auto p = build_process(s.network, s.channel, cs.tasks, cs.durations, cs.start);
    const auto ex = optimize_exact(p);

    const double oracle = testsupport::grid_oracle(p, 1e-3);
    EXPECT_LE(std::abs(ex.objective - oracle), 1e-3 * oracle);

    const auto ex_st = evaluate_plan(ex.plan, p, cs.fading, cs.trials, cs.seed);
    const auto so_st = evaluate_plan(state_oriented_baseline(p), p, cs.fading, cs.trials, cs.seed);
    const auto sat_st = evaluate_plan(satellite_only_baseline(p), p, cs.fading, cs.trials, cs.seed);
    const double gap_so = (so_st.mean - ex_st.mean) / so_st.mean;
    const double gap_sat = (sat_st.mean - ex_st.mean) / sat_st.mean;
    std::printf("  realized mean: exact %.4f s, state-oriented %.4f s (gap %.1f %%), satellite-only %.4f s (gap %.1f %%)\n",
                ex_st.mean, so_st.mean, 100 * gap_so, sat_st.mean, 100 * gap_sat);
    EXPECT_GE(gap_so, 0.05);
    EXPECT_GE(gap_sat, 0.10);
}

// ---------------------------------------------------------------------------

TEST(Criterion3_ConvexityChecks, LinkRateConcaveInPower) {
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const double bw = std::exp(rng.uniform(std::log(1e5), std::log(1e9)));
        const double n0 = std::exp(rng.uniform(std::log(1e-22), std::log(1e-19)));
        const double snr_per_watt = std::exp(rng.uniform(std::log(1e-2), std::log(1e4)));
        const double gain = snr_per_watt * n0 * bw;
        const double p = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
        const double h = 1e-2 * p;
        const double f0 = link_rate(p, gain, bw, n0);
        const double fp = link_rate(p + h, gain, bw, n0);
        const double fm = link_rate(p - h, gain, bw, n0);
        EXPECT_GT(fp, f0);
        EXPECT_LE(fp - 2 * f0 + fm, 1e-6 * f0) << "p " << p << " snr/W " << snr_per_watt;
    }
}

TEST(Criterion3_ConvexityChecks, SchematicLatencyConvex) {
    Rng rng(37);
    for (int i = 0; i < 1000; ++i) {
        const LatencyModelParams prm{rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0) + 1e-3};
        const ResourcePair x{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
        const double ang = rng.uniform(0.0, 2 * std::acos(-1.0));
        const double h = 1e-3;
        const ResourcePair plus{x.comm + h * std::cos(ang), x.comp + h * std::sin(ang)};
        const ResourcePair minus{x.comm - h * std::cos(ang), x.comp - h * std::sin(ang)};
        const double f0 = schematic_latency(x, prm);
        const double second = schematic_latency(plus, prm) - 2 * f0 + schematic_latency(minus, prm);
        EXPECT_GE(second, -1e-6 * f0);

        // Finite-difference Hessian must be positive semidefinite.
        auto f = [&](double a, double b) { return schematic_latency({x.comm + a, x.comp + b}, prm); };
        const double hxx = f(h, 0) - 2 * f0 + f(-h, 0);
        const double hyy = f(0, h) - 2 * f0 + f(0, -h);
        const double hxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / 4;
        EXPECT_GE(hxx, -1e-6 * f0);
        EXPECT_GE(hyy, -1e-6 * f0);
        EXPECT_GE(hxx * hyy - hxy * hxy, -1e-6 * f0 * f0);
    }
}

// ---------------------------------------------------------------------------

TEST(Criterion4_KktResiduals, EveryRowOfEveryInstance) {
    std::size_t checked = 0;
    for (const auto& in : instances()) {
        const auto p = testsupport::random_process(in.seed, in.M, in.K);
        const std::size_t R = p.mtds[0].routes.size();
        std::size_t rows = 1;
        for (std::size_t k = 0; k < in.K; ++k) rows *= R;
        for (std::size_t m = 0; m < in.M; ++m) {
            const auto& mtd = p.mtds[m];
            for (std::size_t code = 0; code < rows; ++code) {
                std::vector<SegmentChannel> segs;
                std::size_t c = code;
                for (std::size_t k = 0; k < in.K; ++k, c /= R) {
                    const auto& h = mtd.hops[k][c % R][0];
                    segs.push_back({p.durations[k], h.gain, h.bandwidth, h.noise_psd});
                }
                const auto a = allocate_power(segs, mtd.task.data_size, mtd.energy_budget, mtd.max_power);
                const auto r = kkt_residuals(segs, mtd.task.data_size, mtd.energy_budget, mtd.max_power, a);
                EXPECT_LE(r.stationarity, 1e-8);
                EXPECT_LE(r.complementarity, 1e-8);
                EXPECT_LE(r.primal, 1e-8);
                ++checked;
            }
        }
    }
    std::printf("  %zu power problems checked\n", checked);
}

// ---------------------------------------------------------------------------

TEST(Criterion5_PlacementOracle, ExhaustiveMatchesBruteForce) {
    const auto t0 = Clock::now();
    Rng rng(55);
    for (int i = 0; i < 50; ++i) {
        PlacementProblem p;
        p.n_satellites = 1 + static_cast<std::size_t>(i % 8);
        for (std::size_t k = 0; k < p.n_satellites; ++k) p.demand.push_back(rng.uniform(0.0, 5.0));
        p.hardening_cost = rng.uniform(0.0, 8.0);
        p.isl_cost = rng.uniform(0.0, 2.0);
        p.hop_budget = static_cast<std::size_t>(rng.below(5));
        const auto oracle = testsupport::placement_brute_force(p.n_satellites, p.demand, p.hardening_cost, p.isl_cost,
                                                               p.hop_budget);
        const auto ex = optimize_placement(p, PlacementMethod::Exhaustive);
        EXPECT_EQ(ex.servers, oracle.subset) << "instance " << i;
        EXPECT_EQ(ex.cost, oracle.cost) << "instance " << i;
        EXPECT_GE(optimize_placement(p, PlacementMethod::Greedy).cost, ex.cost) << "instance " << i;
    }
    EXPECT_LT(seconds_since(t0), 10.0);
}

// ---------------------------------------------------------------------------

namespace {

bool satellite_server_on(const Topology& t, const PeriodDecision& d) {
    for (const auto& s : d.servers)
        if (const Node* n = t.find(s.id); s.on && n && n->kind == NodeKind::Satellite) return true;
    return false;
}

} // namespace

TEST(Criterion6_OrchestrationFourPeriod, EnergyAndStructure) {
    const auto s = load_scenario(scenario_path("four_period_orchestration.yaml"));
    ASSERT_TRUE(s.orchestration);
    ASSERT_EQ(s.orchestration->periods.size(), 4u);
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    const auto tl = run_orchestration(s.orchestration->periods, ctx, GreedyActivationPolicy{});
    ASSERT_EQ(tl.on_demand.size(), 4u);
    ASSERT_EQ(tl.always_on.size(), 4u);

    EXPECT_LE(OrchestrationTimeline::energy(tl.on_demand), OrchestrationTimeline::energy(tl.always_on));
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& d = tl.on_demand[i].decision;
        EXPECT_EQ(tl.on_demand[i].satisfaction, tl.always_on[i].satisfaction) << "period " << i + 1;
        if (i < 2) {
            EXPECT_FALSE(satellite_server_on(s.network, d)) << "period " << i + 1;
            EXPECT_TRUE(d.uavs.empty()) << "period " << i + 1;
        } else {
            EXPECT_TRUE(satellite_server_on(s.network, d)) << "period " << i + 1;
            EXPECT_EQ(d.uavs.size(), 1u) << "period " << i + 1;
        }
    }
    std::printf("  energy on-demand %.6g J, always-on %.6g J, savings %.2f %%\n",
                OrchestrationTimeline::energy(tl.on_demand), OrchestrationTimeline::energy(tl.always_on),
                energy_savings_percent(tl));
}

// ---------------------------------------------------------------------------

TEST(Criterion7_MonteCarloSoundness, NoFadingReproducesPrediction) {
    for (const auto& in : instances()) {
        if (in.seed % 10 != 0) continue;
        const auto p = testsupport::random_process(in.seed, in.M, in.K);
        const auto plan = optimize_exact(p).plan;
        const double predicted = plan_objective(p, plan);
        EXPECT_NEAR(evaluate_plan(plan, p, FadingSpec{}, 50, in.seed).mean, predicted, 1e-12 * predicted);
    }
    const auto s = load_scenario(scenario_path("case_study.yaml"));
    const auto& cs = *s.case_study;
    const auto p = build_process(s.network, s.channel, cs.tasks, cs.durations, cs.start);
    const auto plan = optimize_exact(p).plan;
    const double predicted = plan_objective(p, plan);
    EXPECT_NEAR(evaluate_plan(plan, p, FadingSpec{}, 100, cs.seed).mean, predicted, 1e-12 * predicted);
}

TEST(Criterion7_MonteCarloSoundness, RayleighUnitMean) {
    Rng rng(20231);
    const FadingSpec ray{FadingKind::Rayleigh, 0.0, 8};
    double sum = 0.0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) sum += sample_fading(ray, rng);
    const double mean = sum / n;
    std::printf("  Rayleigh power mean over %d samples: %.6f\n", n, mean);
    EXPECT_NEAR(mean, 1.0, 0.01);
}

// ---------------------------------------------------------------------------

TEST(Criterion8_GeometryOracles, PropagationDelays) {
    const double c = 299'792'458.0;
    for (double d : {600e3, 35'786e3}) {
        const double oracle = d / c;
        EXPECT_NEAR(propagation_delay({0, 0, 0}, {0, 0, d}), oracle, 1e-9 * oracle);
        const double s = d / std::sqrt(3.0);
        EXPECT_NEAR(propagation_delay({1, 2, 3}, {1 + s, 2 - s, 3 + s}), oracle, 1e-9 * oracle);
    }
}

TEST(Criterion8_GeometryOracles, LeoPassWindowLength) {
    OrbitDescriptor o;
    o.kind = OrbitKind::LeoTrack;
    o.altitude = 550e3;
    o.anchor = {-3000e3, -1000e3, 0};
    o.direction_x = 3.0;
    o.direction_y = 4.0;
    o.ground_speed = 7000.0;
    o.pass_period = 5700.0;
    o.coverage_radius = 1000e3;
    // A ground point 2000 km along the track and 600 km to its side.
    const double ux = 0.6, uy = 0.8;
    const Position g{o.anchor.x + 2000e3 * ux + 600e3 * uy, o.anchor.y + 2000e3 * uy - 600e3 * ux, 0};
    const auto w = visibility_windows(o, g, 0.0, o.pass_period);
    ASSERT_EQ(w.size(), 1u);
    const double chord = 2.0 * std::sqrt(1000e3 * 1000e3 - 600e3 * 600e3);
    const double oracle = chord / o.ground_speed;
    EXPECT_NEAR(w[0].end - w[0].start, oracle, 1e-6 * oracle);
    EXPECT_NEAR(w[0].start, (2000e3 - chord / 2) / o.ground_speed, 1e-6 * oracle);
}

// ---------------------------------------------------------------------------

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> run_into(const std::string& args, const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    // validate writes nothing but stdout and takes no --out.
    const std::string out = args.rfind("validate", 0) == 0 ? "" : " --out " + dir.string();
    const std::string cmd =
        std::string(SATMEC_CLI) + " " + args + out + " > " + (dir / "stdout.txt").string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::map<std::string, std::string> files;
    files["exit"] = std::to_string(WIFEXITED(raw) ? WEXITSTATUS(raw) : -1);
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
    return files;
}

} // namespace

TEST(Criterion9_CliDeterminism, RerunsAreByteIdentical) {
    const auto root = fs::temp_directory_path() / "satmec_acceptance_determinism";
    const std::vector<std::string> commands{
        "validate --scenario " + scenario_path("case_study.yaml"),
        "case-study --scenario " + scenario_path("case_study.yaml"),
        "case-study --scenario " + scenario_path("forward_plus_on_orbit.yaml") + " --trials 500 --seed 9",
        "orchestrate --scenario " + scenario_path("four_period_orchestration.yaml"),
        "placement --scenario " + scenario_path("placement_ring4.yaml"),
        "placement --scenario " + scenario_path("placement_free.yaml") + " --method greedy",
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto a = run_into(commands[i], root / ("a" + std::to_string(i)));
        const auto b = run_into(commands[i], root / ("b" + std::to_string(i)));
        EXPECT_EQ(a.at("exit"), "0") << commands[i] << "\n" << a.at("stdout.txt");
        EXPECT_GE(a.size(), 2u) << commands[i];
        EXPECT_EQ(a, b) << commands[i];
    }
    fs::remove_all(root);
}

// ---------------------------------------------------------------------------

namespace {

class CriterionPrinter : public testing::EmptyTestEventListener {
    void OnTestSuiteEnd(const testing::TestSuite& suite) override {
        const std::string name = suite.name();
        if (name.rfind("Criterion", 0) != 0) return;
        const auto us = name.find('_');
        std::printf("criterion %s %s: %s\n", name.substr(9, us - 9).c_str(), name.substr(us + 1).c_str(),
                    suite.Passed() ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
};

} // namespace

int main(int argc, char** argv) {
    testing::InitGoogleTest(&argc, argv);
    testing::UnitTest::GetInstance()->listeners().Append(new CriterionPrinter);
    return RUN_ALL_TESTS();
}
