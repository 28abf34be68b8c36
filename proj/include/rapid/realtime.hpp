#pragma once

#include <cstdint>

#include "rapid/simulator.hpp"

namespace rapid {

// Demonstration mode: the sensor loop and the control loop run as two
// periodic threads sharing a single-slot decision snapshot (writes become
// visible before the reader's next tick) and the action queue. Latency is
// still drawn from the models, scaled into real sleeps by time_scale, so a
// 30 s episode at time_scale 50 takes ~0.6 s of wall time. Counters match
// the virtual-clock semantics only approximately; acceptance runs use
// run_episode. rapid policy only.
struct RealtimeStats {
    std::uint64_t sensor_ticks = 0;
    std::uint64_t control_ticks = 0;
    std::uint64_t dispatches = 0;
    std::uint64_t snapshot_reads = 0;
    std::uint64_t stale_reads = 0;  // reader ticks that saw no fresh write
    std::uint64_t rows_executed = 0;
    std::uint64_t rows_enqueued = 0;
    std::uint64_t rows_discarded = 0;
    std::uint64_t rows_remaining = 0;
    double wall_ms = 0.0;
};

RealtimeStats run_realtime(const Trajectory& traj, const SimConfig& cfg, double time_scale,
                           Transport* cloud_transport = nullptr);

}  // namespace rapid
