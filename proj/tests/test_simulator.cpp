#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <utility>

#include "rapid/simulator.hpp"

using namespace rapid;

namespace {

Trajectory bench_traj(double noise, double duration = 10.0, std::uint64_t seed = 11) {
    return generate_trajectory(make_benchmark_scenario(6, seed, noise, duration));
}

void check_conservation(const EpisodeReport& r) {
    CHECK(r.rows_enqueued == r.rows_executed + r.rows_discarded + r.rows_remaining);
    // every executed row is executed once
    std::set<std::pair<std::uint64_t, std::uint32_t>> seen;
    std::uint64_t executed_in_trace = 0;
    for (const TraceEntry& te : r.trace) {
        if (te.pop != 0) continue;  // PopOutcome::action
        ++executed_in_trace;
        CHECK(seen.insert({te.chunk_seq, te.row_index}).second);
    }
    CHECK(executed_in_trace == r.rows_executed);
    CHECK(r.depletion_refills + r.anomaly_dispatches + r.entropy_offloads == r.dispatch_count);
    CHECK(r.chunk_cycles == r.dispatch_count);
}

}  // namespace

TEST_CASE("edge_only: every cycle is a local inference at the edge latency") {
    SimConfig cfg;
    cfg.policy = Policy::edge_only;
    const auto r = run_episode(bench_traj(0.0), cfg);
    CHECK(r.policy == "edge_only");
    CHECK(r.cloud_requests == 0);
    CHECK(r.edge_requests == r.dispatch_count);
    CHECK(r.depletion_refills == r.dispatch_count);
    CHECK(r.dispatch_count > 0);
    CHECK(r.total_mean_ms == doctest::Approx(812.6).epsilon(1e-12));
    CHECK(r.total_std_ms == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.routing.total_ms == 0.0);
    CHECK(r.decision_hash == 0);
    check_conservation(r);
}

TEST_CASE("cloud_only: every cycle pays cloud latency plus routing") {
    SimConfig cfg;
    cfg.policy = Policy::cloud_only;
    cfg.routing_overhead_ms = 30.0;
    const auto r = run_episode(bench_traj(0.0), cfg);
    CHECK(r.edge_requests == 0);
    CHECK(r.cloud_requests == r.dispatch_count);
    CHECK(r.failed_requests == 0);
    CHECK(r.timeouts == 0);
    CHECK(r.total_mean_ms == doctest::Approx(121.5 + 30.0).epsilon(1e-12));
    CHECK(r.routing.total_ms == doctest::Approx(30.0 * static_cast<double>(r.chunk_cycles)));
    check_conservation(r);
}

TEST_CASE("vision_entropy routes by confidence only") {
    SimConfig cfg;
    cfg.policy = Policy::vision_entropy;

    SUBCASE("threshold no row can clear: behaves like edge refills") {
        cfg.entropy_threshold_bits = 1e9;
        const auto r = run_episode(bench_traj(0.8), cfg);
        CHECK(r.entropy_offloads == 0);
        CHECK(r.cloud_requests == 0);
        CHECK(r.edge_requests == r.depletion_refills);
        check_conservation(r);
    }

    SUBCASE("threshold zero: every confident check fails, offloads preempt") {
        cfg.entropy_threshold_bits = 0.0;
        const auto r = run_episode(bench_traj(0.0), cfg);
        CHECK(r.entropy_offloads > 0);
        CHECK(r.cloud_requests == r.entropy_offloads);
        CHECK(r.edge_requests == r.depletion_refills);
        CHECK(r.preemptions > 0);
        CHECK(r.rows_discarded > 0);
        check_conservation(r);
    }

    SUBCASE("offload count grows with observation noise") {
        cfg.entropy_threshold_bits = 7.2;
        const auto clean = run_episode(bench_traj(0.0), cfg);
        const auto noisy = run_episode(bench_traj(0.8), cfg);
        CHECK(noisy.entropy_offloads >= clean.entropy_offloads);
        CHECK(noisy.entropy_offloads > 0);
        check_conservation(clean);
        check_conservation(noisy);
    }
}

TEST_CASE("rapid: reproducible, kinematics-driven, noise-blind decisions") {
    SimConfig cfg;
    cfg.policy = Policy::rapid;
    cfg.routing_overhead_ms = 10.0;

    const auto a = run_episode(bench_traj(0.0), cfg);
    const auto b = run_episode(bench_traj(0.0), cfg);
    CHECK(a.decision_hash == b.decision_hash);
    CHECK(a.dispatch_count == b.dispatch_count);
    CHECK(a.total_sum_ms == b.total_sum_ms);
    CHECK(a.decision_hash != 0);
    CHECK(a.anomaly_dispatches > 0);

    // observation corruption must not move a single dispatch decision
    const auto noisy = run_episode(bench_traj(0.8), cfg);
    CHECK(noisy.decision_hash == a.decision_hash);
    CHECK(noisy.dispatch_count == a.dispatch_count);
    CHECK(noisy.anomaly_dispatches == a.anomaly_dispatches);

    CHECK(a.cloud_requests == a.dispatch_count);  // rapid always fetches from the cloud
    CHECK(a.edge_requests == 0);
    check_conservation(a);
    check_conservation(noisy);
}

TEST_CASE("trace and decision retention flags") {
    SimConfig cfg;
    cfg.policy = Policy::rapid;
    cfg.keep_decisions = true;
    const Trajectory traj = bench_traj(0.0, 5.0);
    const auto r = run_episode(traj, cfg);
    CHECK(r.sensor_ticks == traj.samples.size());
    CHECK(r.trace.size() == r.control_ticks);
    CHECK(r.decisions.size() == r.sensor_ticks);

    SimConfig lean = cfg;
    lean.keep_decisions = false;
    lean.keep_trace = false;
    const auto r2 = run_episode(traj, lean);
    CHECK(r2.trace.empty());
    CHECK(r2.decisions.empty());
    CHECK(r2.decision_hash == r.decision_hash);
}

TEST_CASE("policy names round-trip") {
    for (Policy p : {Policy::edge_only, Policy::cloud_only, Policy::vision_entropy, Policy::rapid})
        CHECK(policy_from_name(policy_name(p)) == p);
    CHECK_THROWS_AS(policy_from_name("warp_drive"), ConfigError);
}

TEST_CASE("empty trajectory is rejected") {
    Trajectory traj;
    SimConfig cfg;
    CHECK_THROWS_AS(run_episode(traj, cfg), ConfigError);
}
