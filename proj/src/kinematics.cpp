#include "rapid/kinematics.hpp"

#include <cmath>
#include <string>

namespace rapid {

std::vector<double> finite_difference_accel(const JointState& prev, const JointState& cur) {
    const std::size_t n = prev.qdot.size();
    if (cur.qdot.size() != n)
        throw StreamError("finite_difference_accel: joint count changed mid-stream");
    if (cur.t != prev.t + 1)
        throw StreamError("finite_difference_accel: non-consecutive ticks " +
                          std::to_string(prev.t) + " -> " + std::to_string(cur.t));
    const double dt = cur.time_s - prev.time_s;
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw StreamError("finite_difference_accel: non-positive dt at t=" + std::to_string(cur.t));
    std::vector<double> qddot(n);
    for (std::size_t j = 0; j < n; ++j) qddot[j] = (cur.qdot[j] - prev.qdot[j]) / dt;
    return qddot;
}

double accel_magnitude(const std::vector<double>& qddot, const WeightProfile& weights) {
    weights.validate(qddot.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < qddot.size(); ++j) {
        const double v = weights.w[j] * qddot[j];
        acc += v * v;
    }
    return std::sqrt(acc);
}

double torque_variation(const std::vector<double>& tau_prev, const std::vector<double>& tau_cur,
                        const WeightProfile& weights) {
    if (tau_prev.size() != tau_cur.size())
        throw StreamError("torque_variation: length mismatch");
    weights.validate(tau_cur.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < tau_cur.size(); ++j) {
        const double v = weights.w[j] * (tau_cur[j] - tau_prev[j]);
        acc += v * v;
    }
    return acc;
}

double joint_speed(const std::vector<double>& qdot) {
    double acc = 0.0;
    for (double v : qdot) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace rapid
