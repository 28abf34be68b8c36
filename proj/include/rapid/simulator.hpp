#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rapid/chunk_queue.hpp"
#include "rapid/cloud.hpp"
#include "rapid/scenario.hpp"
#include "rapid/trigger.hpp"

namespace rapid {

enum class Policy { edge_only, cloud_only, vision_entropy, rapid };

const char* policy_name(Policy p);
Policy policy_from_name(const std::string& s);

struct SimConfig {
    Policy policy = Policy::rapid;
    TriggerConfig trigger;          // v_max <= 0 resolves via calibrate_v_max
    double entropy_threshold_bits = 7.2;
    ModelParams model;              // cloud service head
    std::uint64_t edge_model_seed = 2;  // edge head shares shape, own weights
    ClientConfig client;            // cloud transport parameters
    LatencyModel edge_latency{812.6, 0.0, 0.0, 0};
    double routing_overhead_ms = 0.0;       // per cloud dispatch
    double interruption_penalty_ms = 0.0;   // per dispatch that preempted pending rows
    StallPolicy stall_policy = StallPolicy::hold_last;
    double load_cloud_gb = 0.0;
    double load_edge_gb = 0.0;
    bool keep_decisions = false;  // retain the sensor-rate Decision sequence
    bool keep_trace = true;       // retain the control-rate trace
    std::string preset_name;
};

enum class RequestCause { depletion, anomaly, entropy };

struct TraceEntry {
    std::uint64_t control_tick = 0;
    Phase phase = Phase::approach;
    bool trigger = false;
    bool dispatch = false;      // dispatcher's bit (rapid), issuance intent otherwise
    bool issued = false;        // a request actually left this tick
    RequestCause cause = RequestCause::depletion;
    std::uint8_t pop = 2;       // PopOutcome
    std::uint64_t chunk_seq = 0;
    std::uint32_t row_index = 0;
    double entropy_bits = -1.0;  // executed row confidence, -1 when absent
};

struct SideStats {
    double mean_ms = 0.0;   // over all chunk cycles, zeros included
    double p50_ms = 0.0;    // over cycles where the side participated
    double p99_ms = 0.0;
    double total_ms = 0.0;
};

struct EpisodeReport {
    std::string policy;
    std::string preset;
    std::string scenario_key;
    std::uint64_t seed = 0;
    double noise_level = 0.0;
    std::uint64_t sensor_ticks = 0;
    std::uint64_t control_ticks = 0;

    std::uint64_t trigger_count = 0;      // control boundaries with latched trigger
    std::uint64_t dispatch_count = 0;     // requests issued
    std::uint64_t depletion_refills = 0;  // issued with depletion cause
    std::uint64_t anomaly_dispatches = 0;
    std::uint64_t entropy_offloads = 0;
    std::uint64_t preemptions = 0;        // dispatches that discarded pending rows
    std::uint64_t cloud_requests = 0;
    std::uint64_t edge_requests = 0;
    std::uint64_t timeouts = 0;           // attempts lost to the timeout
    std::uint64_t failed_requests = 0;    // both attempts lost

    std::uint64_t chunk_cycles = 0;       // == dispatch_count
    std::uint64_t cloud_cycles = 0;
    std::uint64_t edge_cycles = 0;
    SideStats cloud;
    SideStats edge;
    SideStats routing;
    double total_mean_ms = 0.0;  // per-cycle totals, edge + cloud + routing
    double total_std_ms = 0.0;
    double total_sum_ms = 0.0;

    std::uint64_t rows_enqueued = 0;
    std::uint64_t rows_executed = 0;
    std::uint64_t rows_discarded = 0;
    std::uint64_t rows_remaining = 0;
    std::uint64_t stall_ticks = 0;

    double load_cloud_gb = 0.0;
    double load_edge_gb = 0.0;

    std::uint64_t decision_hash = 0;  // folded dispatcher outputs, rapid only

    std::vector<TraceEntry> trace;
    std::vector<Decision> decisions;
};

// Single-threaded virtual-clock co-simulation of one episode. The sensor
// loop feeds the dispatcher every tick; control-rate work (arrivals, the
// dispatch gate, queue pops, request issuance) happens on ticks where
// t % sensor_per_control == 0. Responses apply at the first boundary at or
// after their virtual arrival time. One request in flight at most; dispatch
// decisions landing while one is outstanding are suppressed whole.
EpisodeReport run_episode(const Trajectory& traj, const SimConfig& cfg,
                          Transport* cloud_transport = nullptr);

}  // namespace rapid
