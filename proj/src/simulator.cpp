#include "rapid/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "rapid/rng.hpp"

namespace rapid {

const char* policy_name(Policy p) {
    switch (p) {
        case Policy::edge_only: return "edge_only";
        case Policy::cloud_only: return "cloud_only";
        case Policy::vision_entropy: return "vision_entropy";
        case Policy::rapid: return "rapid";
    }
    return "?";
}

Policy policy_from_name(const std::string& s) {
    if (s == "edge_only") return Policy::edge_only;
    if (s == "cloud_only") return Policy::cloud_only;
    if (s == "vision_entropy") return Policy::vision_entropy;
    if (s == "rapid") return Policy::rapid;
    throw ConfigError("unknown policy: " + s);
}

namespace {

struct Cycle {
    double edge_ms = 0.0;
    double cloud_ms = 0.0;
    double routing_ms = 0.0;
};

struct Pending {
    double arrival_ms = 0.0;
    bool ok = false;
    ActionChunk chunk;
};

std::uint64_t fold_decision(std::uint64_t h, const Decision& d) {
    std::uint64_t bits = 0;
    bits |= d.trigger ? 1u : 0u;
    bits |= d.dispatch ? 2u : 0u;
    bits |= d.depletion ? 4u : 0u;
    bits |= d.control_boundary ? 8u : 0u;
    bits |= d.warmup ? 16u : 0u;
    bits |= static_cast<std::uint64_t>(d.cooldown_remaining) << 8;
    std::uint64_t acc_bits, tau_bits;
    std::memcpy(&acc_bits, &d.m_acc_hat, 8);
    std::memcpy(&tau_bits, &d.m_tau_hat, 8);
    h = mix_seed(h, d.t, bits, acc_bits);
    return mix_seed(h, tau_bits);
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
    return v[std::min(std::max<std::size_t>(rank, 1), v.size()) - 1];
}

}  // namespace

EpisodeReport run_episode(const Trajectory& traj, const SimConfig& cfg,
                          Transport* cloud_transport) {
    if (traj.samples.empty()) throw ConfigError("run_episode: empty trajectory");
    const std::size_t n = traj.n_joints;
    const std::size_t R = traj.sensor_per_control();

    TriggerConfig tc = cfg.trigger;
    tc.sensor_per_control = R;
    tc.nominal_dt_s = 1.0 / traj.sensor_hz;
    if (tc.v_max <= 0.0) tc.v_max = calibrate_v_max(traj);

    std::optional<Dispatcher> dispatcher;
    if (cfg.policy == Policy::rapid) dispatcher.emplace(tc, n);

    MockVlaService local_svc(cfg.model, cfg.client.obs_seed);
    LocalTransport local_transport(local_svc);
    Transport& transport = cloud_transport ? *cloud_transport : local_transport;
    CloudClient client(transport, cfg.client);

    ModelParams edge_params = cfg.model;
    edge_params.seed = cfg.edge_model_seed;

    ActionQueue queue(n, cfg.stall_policy);
    std::optional<Pending> pending;
    std::vector<Cycle> cycles;
    std::uint64_t edge_calls = 0;

    EpisodeReport rep;
    rep.policy = policy_name(cfg.policy);
    rep.preset = cfg.preset_name;
    rep.scenario_key = traj.scenario_key;
    rep.seed = traj.seed;
    rep.noise_level = traj.noise_level;
    rep.sensor_ticks = traj.samples.size();
    rep.load_cloud_gb = cfg.load_cloud_gb;
    rep.load_edge_gb = cfg.load_edge_gb;

    const auto issue = [&](std::uint64_t step, double now_ms, RequestCause cause,
                           TraceEntry& te) {
        const bool to_cloud = cfg.policy == Policy::rapid || cfg.policy == Policy::cloud_only ||
                              (cfg.policy == Policy::vision_entropy && cause == RequestCause::entropy);
        const std::size_t preempted =
            cause == RequestCause::depletion ? 0 : queue.discard_pending();
        if (preempted > 0) ++rep.preemptions;

        Cycle cy;
        Pending pd;
        if (to_cloud) {
            const FetchResult fr = client.fetch(step, traj.noise_level);
            ++rep.cloud_requests;
            rep.timeouts += fr.ok ? static_cast<std::uint64_t>(fr.attempts - 1)
                                  : static_cast<std::uint64_t>(fr.attempts);
            if (!fr.ok) ++rep.failed_requests;
            cy.cloud_ms = fr.latency_ms;
            cy.routing_ms =
                cfg.routing_overhead_ms + (preempted > 0 ? cfg.interruption_penalty_ms : 0.0);
            pd.ok = fr.ok;
            pd.chunk = fr.chunk;
        } else {
            pd.chunk = synthesize_chunk(edge_params, step, traj.noise_level, ChunkSource::edge);
            // high bit marks edge provenance; cloud sequences stay small
            pd.chunk.sequence = 0x8000000000000000ull | edge_calls;
            pd.ok = true;
            ++rep.edge_requests;
            cy.edge_ms = cfg.edge_latency.sample(edge_calls++, 0);
        }
        pd.arrival_ms = now_ms + cy.edge_ms + cy.cloud_ms + cy.routing_ms;
        pending = std::move(pd);
        queue.set_in_flight();
        cycles.push_back(cy);
        ++rep.dispatch_count;
        te.issued = true;
        te.cause = cause;
        switch (cause) {
            case RequestCause::depletion: ++rep.depletion_refills; break;
            case RequestCause::anomaly: ++rep.anomaly_dispatches; break;
            case RequestCause::entropy: ++rep.entropy_offloads; break;
        }
    };

    for (std::size_t t = 0; t < traj.samples.size(); ++t) {
        const JointState& s = traj.samples[t];
        const bool boundary = t % R == 0;
        const double now_ms = s.time_s * 1000.0;

        if (boundary && pending && pending->arrival_ms <= now_ms + 1e-9) {
            if (pending->ok) {
                queue.refill(pending->chunk);
            } else {
                queue.clear_in_flight();
            }
            pending.reset();
        }

        const bool queue_is_empty = queue.empty();
        Decision d;
        if (dispatcher) {
            d = dispatcher->step(s, queue_is_empty);
            rep.decision_hash = fold_decision(rep.decision_hash, d);
            if (cfg.keep_decisions) rep.decisions.push_back(d);
        }

        if (!boundary) continue;

        const std::uint64_t c = t / R;
        ++rep.control_ticks;
        TraceEntry te;
        te.control_tick = c;
        te.phase = traj.phase[t];

        bool want = false;
        RequestCause cause = RequestCause::depletion;
        if (cfg.policy == Policy::rapid) {
            te.trigger = d.trigger;
            te.dispatch = d.dispatch;
            if (d.trigger) ++rep.trigger_count;
            want = d.dispatch;
            cause = d.depletion ? RequestCause::depletion : RequestCause::anomaly;
        } else {
            want = queue_is_empty;
            te.dispatch = want;
        }
        if (want && !queue.in_flight()) issue(c, now_ms, cause, te);

        PopResult pr = queue.pop();
        te.pop = static_cast<std::uint8_t>(pr.outcome);
        if (pr.outcome == PopOutcome::action) {
            te.chunk_seq = pr.chunk_seq;
            te.row_index = static_cast<std::uint32_t>(pr.row_index);
            if (!pr.logits.empty()) {
                te.entropy_bits = row_entropy_bits(pr.logits);
                if (cfg.policy == Policy::vision_entropy &&
                    te.entropy_bits > cfg.entropy_threshold_bits && !queue.in_flight()) {
                    issue(c, now_ms, RequestCause::entropy, te);
                    te.dispatch = true;
                }
            }
        }
        if (cfg.keep_trace) rep.trace.push_back(te);
    }

    // aggregate chunk-cycle costs
    rep.chunk_cycles = cycles.size();
    std::vector<double> cloud_vals, edge_vals, routing_vals, totals;
    for (const Cycle& cy : cycles) {
        const double total = cy.edge_ms + cy.cloud_ms + cy.routing_ms;
        totals.push_back(total);
        rep.cloud.total_ms += cy.cloud_ms;
        rep.edge.total_ms += cy.edge_ms;
        rep.routing.total_ms += cy.routing_ms;
        if (cy.cloud_ms > 0.0) cloud_vals.push_back(cy.cloud_ms);
        if (cy.edge_ms > 0.0) edge_vals.push_back(cy.edge_ms);
        if (cy.routing_ms > 0.0) routing_vals.push_back(cy.routing_ms);
    }
    rep.cloud_cycles = cloud_vals.size();
    rep.edge_cycles = edge_vals.size();
    if (!cycles.empty()) {
        const double nc = static_cast<double>(cycles.size());
        rep.cloud.mean_ms = rep.cloud.total_ms / nc;
        rep.edge.mean_ms = rep.edge.total_ms / nc;
        rep.routing.mean_ms = rep.routing.total_ms / nc;
        double sum = 0.0, sumsq = 0.0;
        for (double v : totals) {
            sum += v;
            sumsq += v * v;
        }
        rep.total_sum_ms = sum;
        rep.total_mean_ms = sum / nc;
        const double var = sumsq / nc - rep.total_mean_ms * rep.total_mean_ms;
        rep.total_std_ms = std::sqrt(var > 0.0 ? var : 0.0);
    }
    rep.cloud.p50_ms = percentile(cloud_vals, 0.50);
    rep.cloud.p99_ms = percentile(cloud_vals, 0.99);
    rep.edge.p50_ms = percentile(edge_vals, 0.50);
    rep.edge.p99_ms = percentile(edge_vals, 0.99);
    rep.routing.p50_ms = percentile(routing_vals, 0.50);
    rep.routing.p99_ms = percentile(routing_vals, 0.99);

    rep.rows_enqueued = queue.enqueued();
    rep.rows_executed = queue.executed();
    rep.rows_discarded = queue.discarded();
    rep.rows_remaining = queue.pending();
    rep.stall_ticks = queue.stalls();
    return rep;
}

}  // namespace rapid
