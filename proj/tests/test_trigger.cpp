#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rapid/trigger.hpp"

using namespace rapid;

namespace {

JointState sample_at(std::uint64_t t, double dt, std::size_t n, double v, double tau) {
    JointState s;
    s.t = t;
    s.time_s = static_cast<double>(t) * dt;
    s.q.assign(n, 0.0);
    s.qdot.assign(n, v);
    s.tau.assign(n, tau);
    return s;
}

TriggerConfig small_config() {
    TriggerConfig cfg;
    cfg.window_acc = 8;
    cfg.window_tau = 4;
    cfg.sensor_per_control = 5;
    cfg.cooldown = 3;
    cfg.v_max = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("phase weights partition unity") {
    auto w = phase_weights(0.0, 2.0);
    CHECK(w.omega_a == 0.0);
    CHECK(w.omega_tau == 1.0);
    w = phase_weights(5.0, 2.0);  // saturates
    CHECK(w.omega_a == 1.0);
    CHECK(w.omega_tau == 0.0);
    w = phase_weights(0.6, 2.0);
    CHECK(w.omega_a == doctest::Approx(0.3));
    CHECK(w.omega_a + w.omega_tau == 1.0);
    CHECK_THROWS_AS(phase_weights(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(phase_weights(-1.0, 2.0), StreamError);
}

TEST_CASE("trigger comparison is strict") {
    PhaseWeights w;
    w.omega_a = 0.5;
    w.omega_tau = 0.5;
    // 0.5 * 1.3 == 0.65 exactly in binary; strict > must not fire
    CHECK_FALSE(evaluate_trigger(w, 1.3, 0.0, 0.65, 0.35));
    CHECK(evaluate_trigger(w, 1.3000001, 0.0, 0.65, 0.35));
    CHECK(evaluate_trigger(w, 0.0, 0.7000001, 0.65, 0.35));
    CHECK_THROWS_AS(evaluate_trigger(w, std::nan(""), 0.0, 0.65, 0.35), StreamError);
}

TEST_CASE("phase weighting gates the opposite branch") {
    PhaseWeights fast;
    fast.omega_a = 1.0;
    fast.omega_tau = 0.0;
    // enormous torque anomaly is invisible at full speed
    CHECK_FALSE(evaluate_trigger(fast, 0.0, 1e9, 0.65, 0.35));
    PhaseWeights still;
    still.omega_a = 0.0;
    still.omega_tau = 1.0;
    CHECK_FALSE(evaluate_trigger(still, 1e9, 0.0, 0.65, 0.35));
    CHECK(evaluate_trigger(still, 0.0, 0.351, 0.65, 0.35));
}

TEST_CASE("cooldown gate patterns") {
    auto r = apply_cooldown(true, 0, 10);
    CHECK(r.dispatch);
    CHECK(r.cooldown == 10);
    r = apply_cooldown(true, 5, 10);  // hot: swallowed, decays
    CHECK_FALSE(r.dispatch);
    CHECK(r.cooldown == 4);
    r = apply_cooldown(false, 5, 10);
    CHECK_FALSE(r.dispatch);
    CHECK(r.cooldown == 4);
    r = apply_cooldown(false, 0, 10);
    CHECK_FALSE(r.dispatch);
    CHECK(r.cooldown == 0);
    // period 0 means every trigger dispatches
    r = apply_cooldown(true, 0, 0);
    CHECK(r.dispatch);
    CHECK(r.cooldown == 0);
}

TEST_CASE("config validation") {
    TriggerConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.v_max = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.cooldown = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.eps = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.window_acc = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.sensor_per_control = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("quiet constant-velocity stream never triggers") {
    const auto cfg = small_config();
    Dispatcher d(cfg, 2);
    for (std::uint64_t t = 0; t < 200; ++t) {
        const auto s = sample_at(t, 0.002, 2, 0.4, 1.5);
        const auto dec = d.step(s, false);
        CHECK_FALSE(dec.trigger);
        CHECK_FALSE(dec.dispatch);
    }
}

TEST_CASE("warmup suppresses early anomalies") {
    const auto cfg = small_config();  // warmup = max(8, 4) ticks
    Dispatcher d(cfg, 2);
    for (std::uint64_t t = 0; t < 6; ++t) {
        // huge torque swing inside warmup
        const auto s = sample_at(t, 0.002, 2, 0.0, t % 2 ? 50.0 : -50.0);
        const auto dec = d.step(s, false);
        CHECK_FALSE(dec.trigger);
        CHECK(dec.warmup);
    }
}

TEST_CASE("spike between boundaries is latched to the next boundary") {
    const auto cfg = small_config();  // boundaries at t % 5 == 0
    Dispatcher d(cfg, 2);
    std::uint64_t t = 0;
    // settle past warmup on a quiet stream
    for (; t < 11; ++t) d.step(sample_at(t, 0.002, 2, 0.0, 1.0), false);
    CHECK_FALSE(d.last().trigger);
    // one-tick torque spike at t=11, off-boundary
    auto dec = d.step(sample_at(t++, 0.002, 2, 0.0, 30.0), false);
    CHECK(dec.trigger);  // instantaneous view
    for (; t < 15; ++t) d.step(sample_at(t, 0.002, 2, 0.0, 1.0), false);
    dec = d.step(sample_at(t++, 0.002, 2, 0.0, 1.0), false);  // t=15, boundary
    CHECK(dec.control_boundary);
    CHECK(dec.trigger);  // latch carried it
    CHECK(dec.dispatch);
    CHECK(dec.cooldown_remaining == cfg.cooldown);
    // torque moving average has flushed by the next boundary: quiet again
    for (; t < 20; ++t) d.step(sample_at(t, 0.002, 2, 0.0, 1.0), false);
    dec = d.step(sample_at(t++, 0.002, 2, 0.0, 1.0), false);  // t=20, boundary
    CHECK(dec.control_boundary);
    CHECK_FALSE(dec.trigger);
    CHECK_FALSE(dec.dispatch);
}

TEST_CASE("depletion dispatch skips the cooldown reload") {
    const auto cfg = small_config();
    Dispatcher d(cfg, 2);
    std::uint64_t t = 0;
    for (; t < 11; ++t) d.step(sample_at(t, 0.002, 2, 0.0, 1.0), false);
    // trip the trigger, dispatch at t=15
    d.step(sample_at(t++, 0.002, 2, 0.0, 30.0), false);
    for (; t < 15; ++t) d.step(sample_at(t, 0.002, 2, 0.0, 1.0), false);
    auto dec = d.step(sample_at(t++, 0.002, 2, 0.0, 1.0), false);
    CHECK(dec.dispatch);
    CHECK_FALSE(dec.depletion);
    CHECK(dec.cooldown_remaining == 3);
    // empty queue at the next boundary: dispatch owed to depletion, cooldown
    // keeps decaying instead of reloading
    for (; t < 20; ++t) d.step(sample_at(t, 0.002, 2, 0.0, 1.0), false);
    dec = d.step(sample_at(t++, 0.002, 2, 0.0, 1.0), true);
    CHECK(dec.control_boundary);
    CHECK(dec.dispatch);
    CHECK(dec.depletion);
    CHECK(dec.cooldown_remaining == 2);
}

TEST_CASE("sample spacing outside the band is rejected") {
    const auto cfg = small_config();
    Dispatcher d(cfg, 2);
    d.step(sample_at(0, 0.002, 2, 0.0, 1.0), false);
    JointState s = sample_at(1, 0.002, 2, 0.0, 1.0);
    s.time_s = 0.010;  // 5x nominal
    CHECK_THROWS_AS(d.step(s, false), StreamError);
}

TEST_CASE("joint count mismatches are rejected") {
    const auto cfg = small_config();
    Dispatcher d(cfg, 3);
    CHECK_THROWS_AS(d.step(sample_at(0, 0.002, 2, 0.0, 0.0), false), StreamError);
    CHECK_THROWS_AS(Dispatcher(cfg, 0), ConfigError);
}

TEST_CASE("footprint is dominated by the configured windows") {
    TriggerConfig cfg = small_config();
    cfg.window_acc = 250;
    cfg.window_tau = 50;
    Dispatcher d(cfg, 6);
    for (std::uint64_t t = 0; t < 2000; ++t) d.step(sample_at(t, 0.002, 6, 0.1, 1.0), false);
    const std::size_t windows = (250 + 50 + 50) * sizeof(double);
    CHECK(d.footprint_bytes() >= windows);
    CHECK(d.footprint_bytes() <= windows + 2048);  // struct + weights + one sample
}
