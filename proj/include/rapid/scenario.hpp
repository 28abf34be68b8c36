#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rapid/types.hpp"

namespace rapid {

struct Segment {
    Phase kind = Phase::approach;
    double duration_s = 1.0;
    double velocity_scale = 1.0;     // scales the per-joint base speed
    double torque_spike_amp = 0.0;   // square-pulse torque height, interaction only
    double accel_spike_amp = 0.0;    // one-tick velocity kick at interaction onset
};

struct Scenario {
    std::size_t n_joints = 6;
    double sensor_hz = 500.0;
    double control_hz = 20.0;
    std::uint64_t seed = 1;
    double noise_level = 0.0;   // observation corruption, kinematics unaffected
    double approach_sway = 0.0; // optional sinusoidal speed sway; 0 keeps scores quiet
    std::vector<Segment> segments;

    double duration_s() const;
    std::size_t sensor_per_control() const;
    void validate() const;
    std::string key() const;  // identity for report comparison
};

struct Trajectory {
    std::size_t n_joints = 0;
    double sensor_hz = 0.0;
    double control_hz = 0.0;
    std::uint64_t seed = 0;
    double noise_level = 0.0;
    std::string scenario_key;
    std::vector<JointState> samples;
    std::vector<Phase> phase;  // one label per sample

    std::size_t sensor_per_control() const {
        return static_cast<std::size_t>(sensor_hz / control_hz + 0.5);
    }
};

// Deterministic synthesis. Approach phases hold piecewise-constant joint
// velocities and constant torque, so both anomaly scores are exactly quiet
// between contacts. Interaction onsets are sharp: a velocity step plus a
// one-tick kick, and seeded square torque pulses starting at the onset.
// Interactions exit through a cosine ramp back to the next segment's
// velocity; the ramp stays inside the interaction label. Kinematics never
// depend on noise_level.
Trajectory generate_trajectory(const Scenario& sc);

// Alternating approach/interaction mix used by the bench and sweep flows:
// ~16% of ticks inside interactions, first onset after 3 s.
Scenario make_benchmark_scenario(std::size_t n_joints, std::uint64_t seed, double noise_level,
                                 double duration_s = 30.0);

// Randomized layout with a chosen interaction tick share; onset separation
// sized so cooldown and window history reset between contacts.
Scenario make_selectivity_scenario(std::uint64_t seed, double interaction_fraction);

// 95th percentile (nearest-rank) of ||qdot|| over samples with
// time_s < horizon_s, floored at floor_speed. Used to resolve v_max = auto.
double calibrate_v_max(const Trajectory& traj, double horizon_s = 2.0, double floor_speed = 0.1);

}  // namespace rapid
