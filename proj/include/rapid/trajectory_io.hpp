#pragma once

#include <string>

#include "rapid/scenario.hpp"

namespace rapid {

// JSONL, one sample per line; field names fixed by docs/trajectory.schema.json.
// q/qdot/tau are arrays of n_joints doubles; phase and obs_noise are optional.
// obs_noise, when present, must be constant across records.
void write_trajectory_jsonl(const std::string& path, const Trajectory& traj);

// control_hz comes from the caller (the file carries sensor-rate data only);
// sensor_hz is recovered from the median timestamp delta.
Trajectory read_trajectory_jsonl(const std::string& path, double control_hz);

}  // namespace rapid
