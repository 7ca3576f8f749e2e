#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "satmec/orchestration.hpp"
#include "satmec/scenario.hpp"

using namespace satmec;

namespace {

const Scenario& four_period() {
    static const Scenario s = load_scenario(std::string(SATMEC_SOURCE_DIR) + "/scenarios/four_period_orchestration.yaml");
    return s;
}

std::set<NodeId> on_servers(const PeriodDecision& d) {
    std::set<NodeId> out;
    for (const auto& s : d.servers)
        if (s.on) out.insert(s.id);
    return out;
}

bool any_on(const Topology& t, const PeriodDecision& d, NodeKind kind) {
    for (const auto& s : d.servers)
        if (const Node* n = t.find(s.id); s.on && n && n->kind == kind) return true;
    return false;
}

} // namespace

TEST(PeriodEnergy, Examples) {
    Topology net;
    PeriodDecision d;
    EXPECT_EQ(period_energy(d, net, 3600.0), 0.0);
    d.servers = {{"a", true, 1.0, 100.0, 0.0}};
    EXPECT_DOUBLE_EQ(period_energy(d, net, 3600.0), 360e3);
    d.servers = {{"a", true, 0.5, 100.0, 20.0}};
    EXPECT_DOUBLE_EQ(period_energy(d, net, 3600.0), 216e3);
    d.servers.push_back({"b", false, 0.0, 500.0, 100.0});
    EXPECT_DOUBLE_EQ(period_energy(d, net, 3600.0), 216e3);
    d.servers[0].duty = 1.5;
    EXPECT_THROW(period_energy(d, net, 3600.0), Error);
}

TEST(PeriodEnergy, IslsDrawLinkPower) {
    Topology net;
    net.links.push_back({"a", "b", LinkKind::Isl, 1e8, 1e-20, 1.0, std::nullopt, 20.0});
    PeriodDecision d;
    d.isls = {0};
    EXPECT_DOUBLE_EQ(period_energy(d, net, 10.0), 200.0);
}

TEST(Orchestrate, NoDemandTurnsEverythingOff) {
    const auto& s = four_period();
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    const DemandSnapshot empty{1, 600.0, {}};
    const auto r = orchestrate_period(ctx, empty, 0.0, GreedyActivationPolicy{});
    EXPECT_TRUE(on_servers(r.decision).empty());
    EXPECT_TRUE(r.decision.uavs.empty());
    EXPECT_TRUE(r.decision.isls.empty());
    EXPECT_EQ(r.energy, 0.0);
    EXPECT_EQ(r.satisfaction, 1.0);
}

TEST(Orchestrate, GatewayDemandKeepsSatellitesOff) {
    const auto& s = four_period();
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    const auto& periods = s.orchestration->periods;
    double start = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto r = orchestrate_period(ctx, periods[i], start, GreedyActivationPolicy{});
        EXPECT_TRUE(any_on(s.network, r.decision, NodeKind::Gateway));
        EXPECT_FALSE(any_on(s.network, r.decision, NodeKind::Satellite));
        EXPECT_TRUE(r.decision.uavs.empty());
        EXPECT_EQ(r.satisfaction, 1.0);
        start += periods[i].duration;
    }
}

TEST(Orchestrate, TightTargetsBringUavAndSatellite) {
    const auto& s = four_period();
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    const auto& p3 = s.orchestration->periods[2];
    const auto r = orchestrate_period(ctx, p3, 7200.0, GreedyActivationPolicy{});
    EXPECT_EQ(r.decision.uavs.size(), 1u);
    EXPECT_TRUE(any_on(s.network, r.decision, NodeKind::Satellite));
    EXPECT_EQ(r.satisfaction, 1.0);
    const auto& tags = r.decision.structure_tags;
    EXPECT_NE(std::find(tags.begin(), tags.end(), "computing-in-forward-link"), tags.end());
    EXPECT_NE(std::find(tags.begin(), tags.end(), "computing-on-orbit"), tags.end());
}

TEST(Orchestrate, IdenticalDemandIdenticalDecisions) {
    const auto& s = four_period();
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    // One pass period per snapshot keeps the satellite geometry identical.
    std::vector<DemandSnapshot> periods(3, s.orchestration->periods[2]);
    for (std::size_t i = 0; i < 3; ++i) periods[i].period = i + 1;
    const auto tl = run_orchestration(periods, ctx, GreedyActivationPolicy{});
    for (std::size_t i = 1; i < 3; ++i) {
        const auto& a = tl.on_demand[0];
        const auto& b = tl.on_demand[i];
        EXPECT_EQ(on_servers(a.decision), on_servers(b.decision));
        EXPECT_EQ(a.decision.uavs, b.decision.uavs);
        EXPECT_EQ(a.decision.isls, b.decision.isls);
        EXPECT_EQ(a.latencies, b.latencies);
        EXPECT_EQ(a.energy, b.energy);
        EXPECT_EQ(b.decision.start, 3600.0 * static_cast<double>(i));
    }
}

TEST(Orchestrate, MonotoneInDemand) {
    const auto& s = four_period();
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    const auto& full = s.orchestration->periods[3];
    std::set<NodeId> prev;
    std::size_t prev_uavs = 0;
    for (std::size_t n = 0; n <= full.mtds.size(); ++n) {
        DemandSnapshot d{4, full.duration, {full.mtds.begin(), full.mtds.begin() + static_cast<std::ptrdiff_t>(n)}};
        const auto r = orchestrate_period(ctx, d, 10800.0, GreedyActivationPolicy{});
        const auto on = on_servers(r.decision);
        EXPECT_TRUE(std::includes(on.begin(), on.end(), prev.begin(), prev.end())) << n;
        EXPECT_GE(r.decision.uavs.size(), prev_uavs) << n;
        EXPECT_GE(r.satisfaction, 0.0);
        EXPECT_LE(r.satisfaction, 1.0);
        prev = on;
        prev_uavs = r.decision.uavs.size();
    }
}

TEST(Orchestrate, UnreachableDemandIsUnsatisfiedNotAnError) {
    auto s = four_period();
    for (auto& l : s.network.links)
        if (l.src == "s0") l.activation = 0.0;
    auto fleet = s.orchestration->fleet;
    fleet.size = 0;
    const OrchestrationContext ctx{s.network, s.channel, fleet};
    const DemandSnapshot d{1, 3600.0, {s.orchestration->periods[0].mtds[0]}};
    const auto r = orchestrate_period(ctx, d, 0.0, GreedyActivationPolicy{});
    EXPECT_EQ(r.satisfaction, 0.0);
    EXPECT_TRUE(std::isinf(r.latencies[0]));
}

TEST(RunOrchestration, EnergyAdditiveAndBelowAlwaysOn) {
    const auto& s = four_period();
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    const auto tl = run_orchestration(s.orchestration->periods, ctx, GreedyActivationPolicy{});
    ASSERT_EQ(tl.on_demand.size(), 4u);
    ASSERT_EQ(tl.always_on.size(), 4u);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& r = tl.on_demand[i];
        sum += r.energy;
        EXPECT_DOUBLE_EQ(r.energy, period_energy(r.decision, s.network, r.decision.duration));
        EXPECT_LE(r.energy, tl.always_on[i].energy);
        EXPECT_GE(r.satisfaction, tl.always_on[i].satisfaction);
        if (i > 0) {
            EXPECT_EQ(r.decision.start, tl.on_demand[i - 1].decision.start + tl.on_demand[i - 1].decision.duration);
        }
        for (const auto& sv : r.decision.servers) {
            EXPECT_GE(sv.duty, 0.0);
            EXPECT_LE(sv.duty, 1.0);
        }
        EXPECT_LE(r.decision.uavs.size(), s.orchestration->fleet.size);
    }
    EXPECT_DOUBLE_EQ(OrchestrationTimeline::energy(tl.on_demand), sum);
    EXPECT_GT(energy_savings_percent(tl), 0.0);
}

TEST(RunOrchestration, NeedsPeriods) {
    const auto& s = four_period();
    const OrchestrationContext ctx{s.network, s.channel, s.orchestration->fleet};
    EXPECT_THROW(run_orchestration({}, ctx, GreedyActivationPolicy{}), Error);
}

TEST(RunOrchestration, TimelineCsvHeader) {
    std::ostringstream os;
    write_timeline_header(os);
    EXPECT_EQ(os.str(),
              "period,start_s,duration_s,active_servers,duty,active_isls,uav_count,latency_p50_s,latency_p95_s,"
              "latency_max_s,satisfaction,energy_j,structures\n");
}
