#include "rapid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rapid/rng.hpp"

namespace rapid {

double Scenario::duration_s() const {
    double d = 0.0;
    for (const Segment& s : segments) d += s.duration_s;
    return d;
}

std::size_t Scenario::sensor_per_control() const {
    return static_cast<std::size_t>(sensor_hz / control_hz + 0.5);
}

void Scenario::validate() const {
    if (n_joints == 0) throw ConfigError("scenario: n_joints must be >= 1");
    if (!(sensor_hz > 0.0) || !(control_hz > 0.0)) throw ConfigError("scenario: rates must be > 0");
    const double ratio = sensor_hz / control_hz;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0)
        throw ConfigError("scenario: sensor_hz must be an integer multiple of control_hz");
    if (segments.empty()) throw ConfigError("scenario: no segments");
    for (const Segment& s : segments)
        if (!(s.duration_s > 0.0)) throw ConfigError("scenario: segment duration must be > 0");
    if (noise_level < 0.0 || noise_level > 1.0)
        throw ConfigError("scenario: noise_level must be in [0, 1]");
    if (approach_sway < 0.0) throw ConfigError("scenario: approach_sway must be >= 0");
}

std::string Scenario::key() const {
    std::ostringstream os;
    os << "n" << n_joints << "-fs" << sensor_hz << "-fc" << control_hz << "-seed" << seed << "-segs"
       << segments.size() << "-dur" << duration_s();
    return os.str();
}

namespace {

struct SegmentPlan {
    const Segment* seg = nullptr;
    std::size_t first_tick = 0;
    std::size_t ticks = 0;
    std::vector<double> velocity;   // per joint, the segment's base command
    std::vector<double> kick;       // onset kick, interactions only
    std::size_t ramp_ticks = 0;     // cosine crossfade tail into the next segment
    // torque pulses as [start, end) tick pairs with per-joint amplitudes
    struct Pulse {
        std::size_t start = 0, end = 0;
        std::vector<double> amp;
    };
    std::vector<Pulse> pulses;
};

std::vector<double> draw_direction(SplitMix64& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (double& x : v) {
        const double mag = rng.next_in(0.4, 1.0);
        x = (rng.next() & 1 ? mag : -mag) * scale;
    }
    return v;
}

}  // namespace

Trajectory generate_trajectory(const Scenario& sc) {
    sc.validate();
    const double dt = 1.0 / sc.sensor_hz;
    const std::size_t n = sc.n_joints;

    SplitMix64 scen_rng(mix_seed(sc.seed, 0x5343454eULL));
    std::vector<double> tau_base(n);
    for (double& t : tau_base) t = scen_rng.next_in(-2.0, 2.0);

    // lay segments out on the tick grid
    std::vector<SegmentPlan> plans(sc.segments.size());
    std::size_t tick = 0;
    for (std::size_t i = 0; i < sc.segments.size(); ++i) {
        const Segment& seg = sc.segments[i];
        SegmentPlan& pl = plans[i];
        pl.seg = &seg;
        pl.first_tick = tick;
        pl.ticks = std::max<std::size_t>(1, static_cast<std::size_t>(seg.duration_s * sc.sensor_hz + 0.5));
        tick += pl.ticks;

        SplitMix64 rng(mix_seed(sc.seed, 0x534547ULL, i));
        pl.velocity = draw_direction(rng, n, seg.velocity_scale);
        if (seg.kind == Phase::idle) std::fill(pl.velocity.begin(), pl.velocity.end(), 0.0);
        if (seg.kind == Phase::interaction && seg.accel_spike_amp > 0.0) {
            pl.kick = draw_direction(rng, n, 1.0);
            double norm = 0.0;
            for (double k : pl.kick) norm += k * k;
            norm = std::sqrt(norm);
            for (double& k : pl.kick) k *= seg.accel_spike_amp / (norm > 0.0 ? norm : 1.0);
        }
    }
    const std::size_t total_ticks = tick;

    // transition ramps: smooth every segment tail except entries into an
    // interaction, which must stay sharp (that step is the onset signal)
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const bool next_is_interaction =
            i + 1 < plans.size() && plans[i + 1].seg->kind == Phase::interaction;
        if (i + 1 < plans.size() && !next_is_interaction) {
            const std::size_t ramp = static_cast<std::size_t>(0.15 * sc.sensor_hz + 0.5);
            plans[i].ramp_ticks = std::min(ramp, plans[i].ticks / 3);
        }
    }

    // torque pulse schedules inside interactions, first pulse at the onset
    for (std::size_t i = 0; i < plans.size(); ++i) {
        SegmentPlan& pl = plans[i];
        const Segment& seg = *pl.seg;
        if (seg.kind != Phase::interaction || seg.torque_spike_amp <= 0.0) continue;
        SplitMix64 rng(mix_seed(sc.seed, 0x50554cULL, i));
        const std::size_t quiet_tail = pl.ramp_ticks;
        const std::size_t usable = pl.ticks > quiet_tail ? pl.ticks - quiet_tail : 0;
        std::size_t at = 0;
        while (at < usable) {
            SegmentPlan::Pulse pulse;
            const std::size_t len =
                static_cast<std::size_t>(rng.next_in(0.04, 0.08) * sc.sensor_hz + 0.5);
            pulse.start = pl.first_tick + at;
            pulse.end = pl.first_tick + std::min(at + std::max<std::size_t>(len, 2), usable);
            pulse.amp.resize(n);
            for (double& a : pulse.amp) {
                const double mag = seg.torque_spike_amp * rng.next_in(0.7, 1.0);
                a = rng.next() & 1 ? mag : -mag;
            }
            pl.pulses.push_back(pulse);
            at += std::max<std::size_t>(len, 2) +
                  static_cast<std::size_t>(rng.next_in(0.12, 0.25) * sc.sensor_hz + 0.5);
        }
    }

    Trajectory traj;
    traj.n_joints = n;
    traj.sensor_hz = sc.sensor_hz;
    traj.control_hz = sc.control_hz;
    traj.seed = sc.seed;
    traj.noise_level = sc.noise_level;
    traj.scenario_key = sc.key();
    traj.samples.resize(total_ticks);
    traj.phase.resize(total_ticks);

    std::vector<double> q(n, 0.0);
    std::size_t seg_idx = 0;
    for (std::size_t t = 0; t < total_ticks; ++t) {
        while (seg_idx + 1 < plans.size() && t >= plans[seg_idx].first_tick + plans[seg_idx].ticks)
            ++seg_idx;
        const SegmentPlan& pl = plans[seg_idx];
        const Segment& seg = *pl.seg;
        const std::size_t local = t - pl.first_tick;

        std::vector<double> qdot = pl.velocity;
        if (seg.kind == Phase::approach && sc.approach_sway > 0.0) {
            const double w = 2.0 * M_PI * 0.5;
            for (std::size_t j = 0; j < n; ++j)
                qdot[j] += sc.approach_sway *
                           std::sin(w * static_cast<double>(t) * dt +
                                    0.7 * static_cast<double>(j));
        }
        if (seg.kind == Phase::interaction && local == 0 && !pl.kick.empty())
            for (std::size_t j = 0; j < n; ++j) qdot[j] += pl.kick[j];
        if (pl.ramp_ticks > 0 && local >= pl.ticks - pl.ramp_ticks && seg_idx + 1 < plans.size()) {
            const double u = static_cast<double>(local - (pl.ticks - pl.ramp_ticks)) /
                             static_cast<double>(pl.ramp_ticks);
            const double a = 0.5 * (1.0 - std::cos(M_PI * u));
            const std::vector<double>& nxt = plans[seg_idx + 1].velocity;
            for (std::size_t j = 0; j < n; ++j)
                qdot[j] = (1.0 - a) * pl.velocity[j] + a * nxt[j];
        }

        std::vector<double> tau = tau_base;
        for (const SegmentPlan::Pulse& pulse : pl.pulses)
            if (t >= pulse.start && t < pulse.end)
                for (std::size_t j = 0; j < n; ++j) tau[j] += pulse.amp[j];

        JointState& s = traj.samples[t];
        s.t = t;
        s.time_s = static_cast<double>(t) * dt;
        s.q = q;
        s.qdot = std::move(qdot);
        s.tau = std::move(tau);
        traj.phase[t] = seg.kind;
        for (std::size_t j = 0; j < n; ++j) q[j] += s.qdot[j] * dt;
    }
    return traj;
}

Scenario make_benchmark_scenario(std::size_t n_joints, std::uint64_t seed, double noise_level,
                                 double duration_s) {
    Scenario sc;
    sc.n_joints = n_joints;
    sc.seed = seed;
    sc.noise_level = noise_level;
    SplitMix64 rng(mix_seed(seed, 0x42454e43ULL));
    double remaining = duration_s;
    bool first = true;
    while (remaining > 0.0) {
        Segment appr;
        appr.kind = Phase::approach;
        appr.duration_s = first ? rng.next_in(3.0, 3.6) : rng.next_in(3.0, 4.2);
        appr.velocity_scale = 1.0;
        first = false;
        if (appr.duration_s >= remaining) {
            appr.duration_s = remaining;
            sc.segments.push_back(appr);
            break;
        }
        sc.segments.push_back(appr);
        remaining -= appr.duration_s;

        Segment inter;
        inter.kind = Phase::interaction;
        inter.duration_s = std::min(rng.next_in(0.55, 0.8), remaining);
        inter.velocity_scale = 0.25;
        inter.torque_spike_amp = 6.0;
        inter.accel_spike_amp = 4.0;
        sc.segments.push_back(inter);
        remaining -= inter.duration_s;
    }
    return sc;
}

Scenario make_selectivity_scenario(std::uint64_t seed, double interaction_fraction) {
    if (!(interaction_fraction > 0.0) || interaction_fraction >= 0.5)
        throw ConfigError("interaction_fraction out of range");
    Scenario sc;
    sc.seed = seed;
    SplitMix64 rng(mix_seed(seed, 0x53454cULL));
    sc.n_joints = 5 + rng.next_below(3);

    const std::size_t n_int = 4 + rng.next_below(3);
    std::vector<double> inter(n_int);
    double inter_total = 0.0;
    for (double& d : inter) {
        d = rng.next_in(0.55, 0.9);
        inter_total += d;
    }
    const double total = inter_total / interaction_fraction;
    const double appr_total = total - inter_total;
    const std::size_t n_appr = n_int + 1;

    std::vector<double> appr(n_appr, 0.0);
    appr[0] = 3.0;
    for (std::size_t i = 1; i < n_appr; ++i) appr[i] = 2.4;
    double leftover = appr_total - std::accumulate(appr.begin(), appr.end(), 0.0);
    if (leftover < 0.0) throw ConfigError("interaction_fraction too high for layout");
    std::vector<double> w(n_appr);
    double wsum = 0.0;
    for (double& x : w) {
        x = rng.next_in(0.2, 1.0);
        wsum += x;
    }
    for (std::size_t i = 0; i < n_appr; ++i) appr[i] += leftover * w[i] / wsum;

    for (std::size_t i = 0; i < n_int; ++i) {
        Segment a;
        a.kind = Phase::approach;
        a.duration_s = appr[i];
        a.velocity_scale = 1.0;
        sc.segments.push_back(a);
        Segment s;
        s.kind = Phase::interaction;
        s.duration_s = inter[i];
        s.velocity_scale = 0.25;
        s.torque_spike_amp = 6.0;
        s.accel_spike_amp = 4.0;
        sc.segments.push_back(s);
    }
    Segment tail;
    tail.kind = Phase::approach;
    tail.duration_s = appr[n_int];
    tail.velocity_scale = 1.0;
    sc.segments.push_back(tail);
    return sc;
}

double calibrate_v_max(const Trajectory& traj, double horizon_s, double floor_speed) {
    std::vector<double> speeds;
    for (const JointState& s : traj.samples) {
        if (s.time_s >= horizon_s) break;
        double acc = 0.0;
        for (double v : s.qdot) acc += v * v;
        speeds.push_back(std::sqrt(acc));
    }
    if (speeds.empty()) return floor_speed;
    std::sort(speeds.begin(), speeds.end());
    // nearest-rank percentile: ceil(0.95 * n) in 1-based indexing
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(speeds.size())));
    const double p95 = speeds[std::min(rank, speeds.size()) - 1];
    return std::max(p95, floor_speed);
}

}  // namespace rapid
