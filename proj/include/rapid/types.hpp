#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rapid/errors.hpp"

namespace rapid {

// One proprioceptive sample at the sensor rate.
struct JointState {
    std::uint64_t t = 0;   // sensor tick index, consecutive within a stream
    double time_s = 0.0;   // wall time of the sample
    std::vector<double> q;     // joint positions, rad
    std::vector<double> qdot;  // joint velocities, rad/s
    std::vector<double> tau;   // joint torques, N*m

    std::size_t joints() const { return qdot.size(); }
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Throws StreamError unless the sample is self-consistent: n_joints entries
// per field, all finite, finite timestamp.
inline void validate_sample(const JointState& s, std::size_t n_joints) {
    if (s.q.size() != n_joints || s.qdot.size() != n_joints || s.tau.size() != n_joints)
        throw StreamError("sample t=" + std::to_string(s.t) + ": field length != " +
                          std::to_string(n_joints));
    if (!std::isfinite(s.time_s)) throw StreamError("sample t=" + std::to_string(s.t) + ": non-finite time");
    if (!all_finite(s.q) || !all_finite(s.qdot) || !all_finite(s.tau))
        throw StreamError("sample t=" + std::to_string(s.t) + ": non-finite field");
}

// Per-joint sensitivity weights. Distal joints carry more signal during
// contact, so the default ramps up the chain: w[j] = 2j/(N+1), j = 1..N.
// The ramp has mean exactly 1, keeping score scales comparable across N.
struct WeightProfile {
    std::vector<double> w;

    static WeightProfile ramp(std::size_t n) {
        WeightProfile p;
        p.w.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            p.w[j] = 2.0 * static_cast<double>(j + 1) / static_cast<double>(n + 1);
        return p;
    }

    static WeightProfile uniform(std::size_t n) {
        WeightProfile p;
        p.w.assign(n, 1.0);
        return p;
    }

    void validate(std::size_t n) const {
        if (w.size() != n) throw ConfigError("weight profile length != joint count");
        for (double x : w)
            if (!std::isfinite(x) || x < 0.0) throw ConfigError("weights must be finite and >= 0");
    }
};

enum class Phase { approach, interaction, idle };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::approach: return "approach";
        case Phase::interaction: return "interaction";
        case Phase::idle: return "idle";
    }
    return "?";
}

inline Phase phase_from_name(const std::string& s) {
    if (s == "approach") return Phase::approach;
    if (s == "interaction") return Phase::interaction;
    if (s == "idle") return Phase::idle;
    throw ConfigError("unknown phase: " + s);
}

}  // namespace rapid
