#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "rapid/config.hpp"

using namespace rapid;

namespace {

std::string write_tmp(const std::string& body) {
    const std::string path = "/tmp/rapid_test_config.cfg";
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("key = value grammar with comments and blanks") {
    const std::string path = write_tmp(
        "# full-line comment\n"
        "\n"
        "policy = cloud_only\n"
        "theta_comp = 0.7   # trailing comment\n"
        "cooldown = 4\n"
        "v_max = auto\n"
        "seed = 99\n"
        "segment = approach, 3.0, 1.0, 0.0, 0.0\n"
        "segment = interaction 0.6 0.25 6.0 4.0\n"
        "load_gb = rapid, 12.1, 2.4\n"
        "predicted_total_ms = 0.4 840.9\n"
        "preset_name = sample\n");
    const AppConfig cfg = parse_config_file(path);
    CHECK(cfg.policy == "cloud_only");
    CHECK(cfg.theta_comp == 0.7);
    CHECK(cfg.cooldown == 4);
    CHECK(cfg.v_max == 0.0);  // auto
    CHECK(cfg.seed == 99);
    REQUIRE(cfg.segments.size() == 2);
    CHECK(cfg.segments[0].kind == Phase::approach);
    CHECK(cfg.segments[1].torque_spike_amp == 6.0);
    REQUIRE(cfg.load_gb.count("rapid") == 1);
    CHECK(cfg.load_gb.at("rapid").first == 12.1);
    REQUIRE(cfg.predicted_total_ms.size() == 1);
    CHECK(cfg.predicted_total_ms[0].second == 840.9);
    CHECK(cfg.preset_name == "sample");
    std::remove(path.c_str());
}

TEST_CASE("parse errors carry the file and line number") {
    const std::string path = write_tmp("policy = rapid\nbogus_key = 3\n");
    try {
        parse_config_file(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":2:") != std::string::npos);
        CHECK(msg.find("bogus_key") != std::string::npos);
    }
    std::remove(path.c_str());

    AppConfig cfg;
    CHECK_THROWS_AS(apply_config_line(cfg, "theta_comp", "fast"), ConfigError);
    CHECK_THROWS_AS(apply_config_line(cfg, "cooldown", "2.5"), ConfigError);
    CHECK_THROWS_AS(apply_config_line(cfg, "segment", "approach 1.0"), ConfigError);
    CHECK_THROWS_AS(apply_config_line(cfg, "load_gb", "warp 1 2"), ConfigError);
    CHECK_THROWS_AS(parse_config_file("/tmp/no_such_config_rapid.cfg"), IoError);

    const std::string bad = write_tmp("just a line without equals\n");
    CHECK_THROWS_AS(parse_config_file(bad), ConfigError);
    std::remove(bad.c_str());
}

TEST_CASE("sim config wiring") {
    AppConfig cfg;
    cfg.policy = "vision_entropy";
    cfg.model_seed = 22;
    cfg.n_joints = 5;
    cfg.chunk_horizon = 4;
    cfg.cloud_base_ms = 100.0;
    cfg.edge_base_ms = 700.0;
    cfg.routing_overhead_ms = 42.0;
    cfg.load_gb["vision_entropy"] = {10.2, 4.3};
    cfg.load_gb["rapid"] = {12.1, 2.4};
    const SimConfig sim = cfg.to_sim_config();
    CHECK(sim.policy == Policy::vision_entropy);
    CHECK(sim.model.seed == 22);
    CHECK(sim.model.joints == 5);
    CHECK(sim.model.horizon == 4);
    CHECK(sim.client.latency.base_ms == 100.0);
    CHECK(sim.edge_latency.base_ms == 700.0);
    CHECK(sim.routing_overhead_ms == 42.0);
    CHECK(sim.load_cloud_gb == 10.2);  // the active policy's row
    CHECK(sim.load_edge_gb == 4.3);

    cfg.stall_policy = "zero_hold";
    CHECK(cfg.to_sim_config().stall_policy == StallPolicy::zero_hold);
    cfg.stall_policy = "panic";
    CHECK_THROWS_AS(cfg.to_sim_config(), ConfigError);
}

TEST_CASE("scenario wiring: explicit segments or benchmark fallback") {
    AppConfig cfg;
    cfg.seed = 11;
    cfg.duration_s = 12.0;
    const Scenario bench = cfg.to_scenario();
    CHECK(bench.duration_s() == doctest::Approx(12.0));
    CHECK(bench.segments.size() > 1);

    cfg.segments.push_back(Segment{Phase::approach, 2.0, 1.0, 0.0, 0.0});
    const Scenario manual = cfg.to_scenario();
    CHECK(manual.segments.size() == 1);
    CHECK(manual.seed == 11);

    cfg.segments[0].duration_s = -1.0;
    CHECK_THROWS_AS(cfg.to_scenario(), ConfigError);
}

TEST_CASE("shipped presets parse and resolve") {
    for (const std::string name : {"presets/real.cfg", "presets/sim.cfg", "presets/tab1.cfg"}) {
        const AppConfig cfg = parse_config_file(name);
        CHECK_FALSE(cfg.preset_name.empty());
        const SimConfig sim = cfg.to_sim_config();
        const Scenario sc = cfg.to_scenario();
        CHECK(sc.duration_s() > 0.0);
        CHECK((sim.policy == Policy::rapid || sim.policy == Policy::vision_entropy));
    }
}
