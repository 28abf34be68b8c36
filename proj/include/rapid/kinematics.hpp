#pragma once

#include <vector>

#include "rapid/types.hpp"

namespace rapid {

// Backward finite difference of joint velocity: (cur.qdot - prev.qdot) / dt
// with dt = cur.time_s - prev.time_s. Requires consecutive tick indices and
// dt > 0; throws StreamError otherwise. Length-N in, length-N out.
std::vector<double> finite_difference_accel(const JointState& prev, const JointState& cur);

// Weighted L2 magnitude of an acceleration estimate: sqrt(sum_j (w_j * a_j)^2).
double accel_magnitude(const std::vector<double>& qddot, const WeightProfile& weights);

// Weighted squared L2 magnitude of the torque step between two samples:
// sum_j (w_j * (tau_cur_j - tau_prev_j))^2. No square root; the quantity is
// averaged over a short window downstream, and squaring keeps spikes heavy.
double torque_variation(const std::vector<double>& tau_prev, const std::vector<double>& tau_cur,
                        const WeightProfile& weights);

// Unweighted L2 norm of joint velocity.
double joint_speed(const std::vector<double>& qdot);

}  // namespace rapid
