#include "rapid/config.hpp"

#include <fstream>
#include <sstream>

namespace rapid {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
    std::string spaced = s;
    for (char& c : spaced)
        if (c == ',') c = ' ';
    std::istringstream is(spaced);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": bad number '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": bad integer '" + v + "'");
    }
}

}  // namespace

void apply_config_line(AppConfig& c, const std::string& key, const std::string& value) {
    if (key == "theta_comp") c.theta_comp = to_double(key, value);
    else if (key == "theta_red") c.theta_red = to_double(key, value);
    else if (key == "eps") c.eps = to_double(key, value);
    else if (key == "v_max") c.v_max = value == "auto" ? 0.0 : to_double(key, value);
    else if (key == "cooldown") c.cooldown = static_cast<int>(to_u64(key, value));
    else if (key == "window_acc") c.window_acc = to_u64(key, value);
    else if (key == "window_tau") c.window_tau = to_u64(key, value);
    else if (key == "n_joints") c.n_joints = to_u64(key, value);
    else if (key == "sensor_hz") c.sensor_hz = to_double(key, value);
    else if (key == "control_hz") c.control_hz = to_double(key, value);
    else if (key == "seed") c.seed = to_u64(key, value);
    else if (key == "noise_level") c.noise_level = to_double(key, value);
    else if (key == "duration_s") c.duration_s = to_double(key, value);
    else if (key == "approach_sway") c.approach_sway = to_double(key, value);
    else if (key == "policy") c.policy = value;
    else if (key == "entropy_threshold_bits") c.entropy_threshold_bits = to_double(key, value);
    else if (key == "chunk_horizon") c.chunk_horizon = to_u64(key, value);
    else if (key == "bins") c.bins = to_u64(key, value);
    else if (key == "obs_bytes") c.obs_bytes = to_u64(key, value);
    else if (key == "model_seed") c.model_seed = to_u64(key, value);
    else if (key == "edge_model_seed") c.edge_model_seed = to_u64(key, value);
    else if (key == "obs_seed") c.obs_seed = to_u64(key, value);
    else if (key == "noise_seed") c.noise_seed = to_u64(key, value);
    else if (key == "latency_seed") c.latency_seed = to_u64(key, value);
    else if (key == "logit_scale") c.logit_scale = to_double(key, value);
    else if (key == "logit_noise_gain") c.logit_noise_gain = to_double(key, value);
    else if (key == "logit_jitter") c.logit_jitter = to_double(key, value);
    else if (key == "cloud_base_ms") c.cloud_base_ms = to_double(key, value);
    else if (key == "cloud_jitter_ms") c.cloud_jitter_ms = to_double(key, value);
    else if (key == "bandwidth_mbps") c.bandwidth_mbps = to_double(key, value);
    else if (key == "edge_base_ms") c.edge_base_ms = to_double(key, value);
    else if (key == "edge_jitter_ms") c.edge_jitter_ms = to_double(key, value);
    else if (key == "timeout_ms") c.timeout_ms = to_double(key, value);
    else if (key == "routing_overhead_ms") c.routing_overhead_ms = to_double(key, value);
    else if (key == "interruption_penalty_ms") c.interruption_penalty_ms = to_double(key, value);
    else if (key == "stall_policy") c.stall_policy = value;
    else if (key == "segment") {
        const auto t = tokens(value);
        if (t.size() != 5)
            throw ConfigError("segment: want 'kind duration velocity_scale torque_amp accel_amp'");
        Segment s;
        s.kind = phase_from_name(t[0]);
        s.duration_s = to_double(key, t[1]);
        s.velocity_scale = to_double(key, t[2]);
        s.torque_spike_amp = to_double(key, t[3]);
        s.accel_spike_amp = to_double(key, t[4]);
        c.segments.push_back(s);
    } else if (key == "load_gb") {
        const auto t = tokens(value);
        if (t.size() != 3) throw ConfigError("load_gb: want 'policy cloud_gb edge_gb'");
        policy_from_name(t[0]);
        c.load_gb[t[0]] = {to_double(key, t[1]), to_double(key, t[2])};
    } else if (key == "predicted_total_ms") {
        const auto t = tokens(value);
        if (t.size() != 2) throw ConfigError("predicted_total_ms: want 'noise_level ms'");
        c.predicted_total_ms.emplace_back(to_double(key, t[0]), to_double(key, t[1]));
    } else if (key == "preset_name") {
        c.preset_name = value;
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

AppConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path);
    AppConfig cfg;
    cfg.preset_name = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

SimConfig AppConfig::to_sim_config() const {
    SimConfig sim;
    sim.policy = policy_from_name(policy);
    sim.trigger.theta_comp = theta_comp;
    sim.trigger.theta_red = theta_red;
    sim.trigger.eps = eps;
    sim.trigger.v_max = v_max;  // <= 0 resolved inside run_episode
    sim.trigger.cooldown = cooldown;
    sim.trigger.window_acc = window_acc;
    sim.trigger.window_tau = window_tau;
    sim.entropy_threshold_bits = entropy_threshold_bits;
    sim.model.seed = model_seed;
    sim.model.horizon = chunk_horizon;
    sim.model.joints = n_joints;
    sim.model.bins = bins;
    sim.model.logit_scale = logit_scale;
    sim.model.logit_noise_gain = logit_noise_gain;
    sim.model.logit_jitter = logit_jitter;
    sim.edge_model_seed = edge_model_seed;
    sim.client.obs_bytes = obs_bytes;
    sim.client.obs_seed = obs_seed;
    sim.client.noise_seed = noise_seed;
    sim.client.timeout_ms = timeout_ms;
    sim.client.latency = LatencyModel{cloud_base_ms, cloud_jitter_ms, bandwidth_mbps, latency_seed};
    sim.edge_latency = LatencyModel{edge_base_ms, edge_jitter_ms, 0.0, latency_seed + 1};
    sim.routing_overhead_ms = routing_overhead_ms;
    sim.interruption_penalty_ms = interruption_penalty_ms;
    if (stall_policy == "hold_last") sim.stall_policy = StallPolicy::hold_last;
    else if (stall_policy == "zero_hold") sim.stall_policy = StallPolicy::zero_hold;
    else throw ConfigError("unknown stall_policy: " + stall_policy);
    const auto it = load_gb.find(policy);
    if (it != load_gb.end()) {
        sim.load_cloud_gb = it->second.first;
        sim.load_edge_gb = it->second.second;
    }
    sim.preset_name = preset_name;
    return sim;
}

Scenario AppConfig::to_scenario() const {
    if (segments.empty()) {
        Scenario sc = make_benchmark_scenario(n_joints, seed, noise_level, duration_s);
        sc.sensor_hz = sensor_hz;
        sc.control_hz = control_hz;
        sc.approach_sway = approach_sway;
        sc.validate();
        return sc;
    }
    Scenario sc;
    sc.n_joints = n_joints;
    sc.sensor_hz = sensor_hz;
    sc.control_hz = control_hz;
    sc.seed = seed;
    sc.noise_level = noise_level;
    sc.approach_sway = approach_sway;
    sc.segments = segments;
    sc.validate();
    return sc;
}

}  // namespace rapid
