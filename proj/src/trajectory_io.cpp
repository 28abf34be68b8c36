#include "rapid/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace rapid {

using nlohmann::json;

void write_trajectory_jsonl(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const JointState& s = traj.samples[i];
        json j;
        j["t"] = s.t;
        j["time_s"] = s.time_s;
        j["q"] = s.q;
        j["qdot"] = s.qdot;
        j["tau"] = s.tau;
        j["phase"] = phase_name(traj.phase[i]);
        j["obs_noise"] = traj.noise_level;
        out << j.dump() << "\n";
    }
}

Trajectory read_trajectory_jsonl(const std::string& path, double control_hz) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    Trajectory traj;
    traj.control_hz = control_hz;
    std::string line;
    std::size_t lineno = 0;
    double noise = 0.0;
    bool noise_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw StreamError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        JointState s;
        try {
            s.t = j.at("t").get<std::uint64_t>();
            s.time_s = j.at("time_s").get<double>();
            s.q = j.at("q").get<std::vector<double>>();
            s.qdot = j.at("qdot").get<std::vector<double>>();
            s.tau = j.at("tau").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw StreamError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        Phase ph = Phase::approach;
        if (j.contains("phase")) ph = phase_from_name(j.at("phase").get<std::string>());
        if (j.contains("obs_noise")) {
            const double v = j.at("obs_noise").get<double>();
            if (noise_seen && std::abs(v - noise) > 1e-12)
                throw StreamError(path + ":" + std::to_string(lineno) +
                                  ": obs_noise must be constant");
            noise = v;
            noise_seen = true;
        }
        if (traj.samples.empty()) {
            traj.n_joints = s.qdot.size();
        } else {
            if (s.t != traj.samples.back().t + 1)
                throw StreamError(path + ":" + std::to_string(lineno) + ": non-consecutive tick");
            if (s.time_s <= traj.samples.back().time_s)
                throw StreamError(path + ":" + std::to_string(lineno) + ": time not increasing");
        }
        validate_sample(s, traj.n_joints);
        traj.samples.push_back(std::move(s));
        traj.phase.push_back(ph);
    }
    if (traj.samples.size() < 2) throw StreamError(path + ": need at least two samples");
    traj.noise_level = noise;

    std::vector<double> dts;
    dts.reserve(traj.samples.size() - 1);
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        dts.push_back(traj.samples[i].time_s - traj.samples[i - 1].time_s);
    std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2),
                     dts.end());
    const double dt = dts[dts.size() / 2];
    traj.sensor_hz = std::round(1.0 / dt);
    traj.seed = 0;
    traj.scenario_key = "replay-n" + std::to_string(traj.n_joints) + "-ticks" +
                        std::to_string(traj.samples.size());

    const double ratio = traj.sensor_hz / control_hz;
    if (!(control_hz > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0)
        throw ConfigError("control_hz must integer-divide the stream rate " +
                          std::to_string(traj.sensor_hz));
    return traj;
}

}  // namespace rapid
