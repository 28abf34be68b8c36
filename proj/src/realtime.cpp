#include "rapid/realtime.hpp"

#include <atomic>
#include <chrono>
#include <future>
#include <mutex>
#include <thread>

namespace rapid {

namespace {

// Single-slot snapshot: one writer, one reader, last write wins.
class DecisionSnapshot {
  public:
    void publish(const Decision& d) {
        std::lock_guard<std::mutex> lock(m_);
        d_ = d;
        ++version_;
    }
    bool read(Decision& out, std::uint64_t& last_seen) {
        std::lock_guard<std::mutex> lock(m_);
        if (version_ == last_seen) return false;
        out = d_;
        last_seen = version_;
        return true;
    }

  private:
    std::mutex m_;
    Decision d_;
    std::uint64_t version_ = 0;
};

}  // namespace

RealtimeStats run_realtime(const Trajectory& traj, const SimConfig& cfg, double time_scale,
                           Transport* cloud_transport) {
    if (cfg.policy != Policy::rapid)
        throw ConfigError("realtime mode demonstrates the rapid policy only");
    if (!(time_scale > 0.0)) throw ConfigError("time_scale must be > 0");
    if (traj.samples.empty()) throw ConfigError("empty trajectory");

    const std::size_t R = traj.sensor_per_control();
    TriggerConfig tc = cfg.trigger;
    tc.sensor_per_control = R;
    tc.nominal_dt_s = 1.0 / traj.sensor_hz;
    if (tc.v_max <= 0.0) tc.v_max = calibrate_v_max(traj);
    Dispatcher dispatcher(tc, traj.n_joints);

    MockVlaService svc(cfg.model, cfg.client.obs_seed);
    LocalTransport local(svc);
    Transport& transport = cloud_transport ? *cloud_transport : local;
    CloudClient client(transport, cfg.client);

    ActionQueue queue(traj.n_joints, cfg.stall_policy);
    std::mutex queue_mutex;
    DecisionSnapshot snapshot;
    std::atomic<bool> sensor_done{false};
    RealtimeStats stats;

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const double sensor_period_us = 1e6 / traj.sensor_hz / time_scale;
    const double control_period_us = 1e6 / traj.control_hz / time_scale;

    std::thread sensor([&] {
        for (std::size_t t = 0; t < traj.samples.size(); ++t) {
            bool qe;
            {
                std::lock_guard<std::mutex> lock(queue_mutex);
                qe = queue.empty();
            }
            const Decision d = dispatcher.step(traj.samples[t], qe);
            snapshot.publish(d);
            ++stats.sensor_ticks;
            std::this_thread::sleep_until(
                start + std::chrono::microseconds(
                            static_cast<std::int64_t>((t + 1) * sensor_period_us)));
        }
        sensor_done.store(true);
    });

    std::thread control([&] {
        std::uint64_t last_seen = 0;
        std::future<FetchResult> inflight;
        std::uint64_t c = 0;
        while (!sensor_done.load() || inflight.valid()) {
            if (inflight.valid() &&
                inflight.wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
                const FetchResult fr = inflight.get();
                std::lock_guard<std::mutex> lock(queue_mutex);
                if (fr.ok) queue.refill(fr.chunk);
                else queue.clear_in_flight();
            }
            Decision d;
            const bool fresh = snapshot.read(d, last_seen);
            ++stats.snapshot_reads;
            if (!fresh) ++stats.stale_reads;
            bool issue = false;
            {
                std::lock_guard<std::mutex> lock(queue_mutex);
                const bool gate = fresh && d.control_boundary ? d.dispatch : queue.empty();
                if (gate && !queue.in_flight()) {
                    if (fresh && d.dispatch && !d.depletion) queue.discard_pending();
                    queue.set_in_flight();
                    issue = true;
                }
                queue.pop();
            }
            if (issue) {
                ++stats.dispatches;
                const std::uint64_t step = c;
                inflight = std::async(std::launch::async, [&client, &traj, step, time_scale] {
                    FetchResult fr = client.fetch(step, traj.noise_level);
                    std::this_thread::sleep_for(std::chrono::microseconds(
                        static_cast<std::int64_t>(fr.latency_ms * 1000.0 / time_scale)));
                    return fr;
                });
            }
            ++c;
            ++stats.control_ticks;
            std::this_thread::sleep_until(
                start +
                std::chrono::microseconds(static_cast<std::int64_t>(c * control_period_us)));
        }
    });

    sensor.join();
    control.join();
    stats.rows_executed = queue.executed();
    stats.rows_enqueued = queue.enqueued();
    stats.rows_discarded = queue.discarded();
    stats.rows_remaining = queue.pending();
    stats.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    return stats;
}

}  // namespace rapid
