#pragma once

#include <map>
#include <string>
#include <vector>

#include "rapid/simulator.hpp"

namespace rapid {

// Flat key = value configuration; see presets/ for the grammar. Repeated
// keys: segment, load_gb, predicted_total_ms.
struct AppConfig {
    // trigger
    double theta_comp = 0.65;
    double theta_red = 0.35;
    double eps = 1e-6;
    double v_max = 0.0;  // <= 0 means auto-calibrate from the stream
    int cooldown = 10;
    std::size_t window_acc = 250;
    std::size_t window_tau = 50;

    // scenario
    std::size_t n_joints = 6;
    double sensor_hz = 500.0;
    double control_hz = 20.0;
    std::uint64_t seed = 1;
    double noise_level = 0.0;
    double duration_s = 30.0;
    double approach_sway = 0.0;
    std::vector<Segment> segments;  // empty: benchmark layout from seed

    // policy and inference
    std::string policy = "rapid";
    double entropy_threshold_bits = 7.2;
    std::size_t chunk_horizon = 8;
    std::size_t bins = 256;
    std::size_t obs_bytes = 8192;
    std::uint64_t model_seed = 1;
    std::uint64_t edge_model_seed = 2;
    std::uint64_t obs_seed = 42;
    std::uint64_t noise_seed = 7;
    std::uint64_t latency_seed = 0;
    double logit_scale = 12.5;
    double logit_noise_gain = 3.4;
    double logit_jitter = 0.18;

    // latency and routing
    double cloud_base_ms = 121.5;
    double cloud_jitter_ms = 0.0;
    double bandwidth_mbps = 0.0;  // 0 = infinite
    double edge_base_ms = 812.6;
    double edge_jitter_ms = 0.0;
    double timeout_ms = 2000.0;
    double routing_overhead_ms = 0.0;
    double interruption_penalty_ms = 0.0;
    std::string stall_policy = "hold_last";

    // per-policy memory-load attribution, GB
    std::map<std::string, std::pair<double, double>> load_gb;  // policy -> {cloud, edge}

    // frozen latency predictions per noise level (regression reference)
    std::vector<std::pair<double, double>> predicted_total_ms;  // {noise, ms}

    std::string preset_name;

    SimConfig to_sim_config() const;
    Scenario to_scenario() const;
};

AppConfig parse_config_file(const std::string& path);
void apply_config_line(AppConfig& cfg, const std::string& key, const std::string& value);

}  // namespace rapid
