#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "rapid/config.hpp"
#include "rapid/realtime.hpp"
#include "rapid/report.hpp"
#include "rapid/trajectory_io.hpp"

namespace {

using namespace rapid;

std::string resolve_preset(const std::string& name) {
    namespace fs = std::filesystem;
    if (fs::exists(name)) return name;
    const std::string local = "presets/" + name + ".cfg";
    if (fs::exists(local)) return local;
    throw ConfigError("preset not found: " + name + " (tried '" + name + "', '" + local + "')");
}

// Flag storage shared by the run-like subcommands; values override whatever
// the preset file set once the option was actually given.
struct Flags {
    std::string preset;
    std::string policy;
    double theta_comp = 0, theta_red = 0, v_max = 0, eps = 0, noise = 0, duration = 0;
    double entropy_threshold = 0, routing_overhead = 0, interruption_penalty = 0;
    std::uint64_t seed = 0, window_acc = 0, window_tau = 0, joints = 0;
    int cooldown = 0;

    CLI::Option *o_policy = nullptr, *o_tc = nullptr, *o_tr = nullptr, *o_vm = nullptr,
                *o_eps = nullptr, *o_noise = nullptr, *o_dur = nullptr, *o_ent = nullptr,
                *o_ro = nullptr, *o_ip = nullptr, *o_seed = nullptr, *o_wa = nullptr,
                *o_wt = nullptr, *o_nj = nullptr, *o_cd = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset,--config", preset, "preset name or config file path");
        o_policy = cmd->add_option("--policy", policy, "edge_only|cloud_only|vision_entropy|rapid");
        o_tc = cmd->add_option("--theta-comp", theta_comp, "compliance branch threshold");
        o_tr = cmd->add_option("--theta-red", theta_red, "redundancy branch threshold");
        o_vm = cmd->add_option("--vmax", v_max, "phase weight saturation speed; 0 = auto");
        o_eps = cmd->add_option("--eps", eps, "normalization guard");
        o_cd = cmd->add_option("--cooldown", cooldown, "control ticks between dispatches");
        o_wa = cmd->add_option("--window-acc", window_acc, "acceleration stats window");
        o_wt = cmd->add_option("--window-tau", window_tau, "torque stats window");
        o_noise = cmd->add_option("--noise", noise, "observation corruption in [0,1]");
        o_dur = cmd->add_option("--duration", duration, "scenario duration, s");
        o_seed = cmd->add_option("--seed", seed, "scenario seed");
        o_nj = cmd->add_option("--joints", joints, "joint count");
        o_ent = cmd->add_option("--entropy-threshold", entropy_threshold, "bits");
        o_ro = cmd->add_option("--routing-overhead", routing_overhead, "ms per cloud dispatch");
        o_ip = cmd->add_option("--interruption-penalty", interruption_penalty,
                               "ms per preempting dispatch");
    }

    AppConfig build() const {
        AppConfig cfg;
        if (!preset.empty()) cfg = parse_config_file(resolve_preset(preset));
        if (o_policy->count()) cfg.policy = policy;
        if (o_tc->count()) cfg.theta_comp = theta_comp;
        if (o_tr->count()) cfg.theta_red = theta_red;
        if (o_vm->count()) cfg.v_max = v_max;
        if (o_eps->count()) cfg.eps = eps;
        if (o_cd->count()) cfg.cooldown = cooldown;
        if (o_wa->count()) cfg.window_acc = window_acc;
        if (o_wt->count()) cfg.window_tau = window_tau;
        if (o_noise->count()) cfg.noise_level = noise;
        if (o_dur->count()) cfg.duration_s = duration;
        if (o_seed->count()) cfg.seed = seed;
        if (o_nj->count()) cfg.n_joints = joints;
        if (o_ent->count()) cfg.entropy_threshold_bits = entropy_threshold;
        if (o_ro->count()) cfg.routing_overhead_ms = routing_overhead;
        if (o_ip->count()) cfg.interruption_penalty_ms = interruption_penalty;
        return cfg;
    }
};

std::unique_ptr<Transport> make_transport(const std::string& connect) {
    if (connect.empty()) return nullptr;
    const auto colon = connect.rfind(':');
    if (colon == std::string::npos) throw ConfigError("--connect wants host:port");
    return std::make_unique<SocketTransport>(
        connect.substr(0, colon),
        static_cast<std::uint16_t>(std::stoi(connect.substr(colon + 1))));
}

void print_report(const EpisodeReport& rep) {
    std::cout << render_table({rep});
    std::printf(
        "ticks: %llu sensor / %llu control | trigger %llu, dispatch %llu "
        "(depletion %llu, anomaly %llu, entropy %llu), preempt %llu\n",
        static_cast<unsigned long long>(rep.sensor_ticks),
        static_cast<unsigned long long>(rep.control_ticks),
        static_cast<unsigned long long>(rep.trigger_count),
        static_cast<unsigned long long>(rep.dispatch_count),
        static_cast<unsigned long long>(rep.depletion_refills),
        static_cast<unsigned long long>(rep.anomaly_dispatches),
        static_cast<unsigned long long>(rep.entropy_offloads),
        static_cast<unsigned long long>(rep.preemptions));
    std::printf("rows: enqueued %llu = executed %llu + discarded %llu + remaining %llu; stalls %llu\n",
                static_cast<unsigned long long>(rep.rows_enqueued),
                static_cast<unsigned long long>(rep.rows_executed),
                static_cast<unsigned long long>(rep.rows_discarded),
                static_cast<unsigned long long>(rep.rows_remaining),
                static_cast<unsigned long long>(rep.stall_ticks));
}

void write_csv(const std::string& path, const std::vector<EpisodeReport>& reps) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << report_csv_header() << "\n";
    for (const auto& r : reps) out << report_csv_row(r) << "\n";
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinematic-triggered edge-cloud offloading simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run one episode and report");
    Flags run_flags;
    run_flags.attach(run);
    std::string run_report, run_csv, run_emit_traj, run_connect;
    bool run_trace = false, run_realtime_mode = false;
    double run_time_scale = 50.0;
    run->add_option("--report", run_report, "write EpisodeReport JSON here");
    run->add_option("--csv", run_csv, "write CSV row here");
    run->add_option("--emit-trajectory", run_emit_traj, "dump the generated stream as JSONL");
    run->add_option("--connect", run_connect, "host:port of a live chunk service");
    run->add_flag("--trace", run_trace, "include the control-tick trace in the JSON report");
    run->add_flag("--realtime", run_realtime_mode, "two periodic threads instead of virtual clock");
    run->add_option("--time-scale", run_time_scale, "realtime speedup factor");

    // bench
    auto* bench = app.add_subcommand("bench", "run all four policies on one scenario");
    Flags bench_flags;
    bench_flags.attach(bench);
    std::string bench_report, bench_csv;
    double bench_fit_total = 0.0;
    bench->add_option("--report", bench_report, "write the comparison JSON here");
    bench->add_option("--csv", bench_csv, "write per-policy CSV here");
    bench->add_option("--fit-vision-total", bench_fit_total,
                      "fit routing overhead so vision_entropy lands on this mean total (ms)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid over trigger thresholds");
    Flags sweep_flags;
    sweep_flags.attach(sweep);
    std::vector<double> sweep_tc{0.45, 0.55, 0.65, 0.75, 0.85};
    std::vector<double> sweep_tr{0.15, 0.25, 0.35, 0.45, 0.55};
    std::string sweep_csv;
    sweep->add_option("--theta-comp-grid", sweep_tc, "compliance thresholds to sweep");
    sweep->add_option("--theta-red-grid", sweep_tr, "redundancy thresholds to sweep");
    sweep->add_option("--csv", sweep_csv, "write the grid CSV here");

    // replay
    auto* replay = app.add_subcommand("replay", "run a policy over a recorded JSONL stream");
    Flags replay_flags;
    replay_flags.attach(replay);
    std::string replay_input, replay_report;
    double replay_control_hz = 20.0;
    replay->add_option("--input", replay_input, "trajectory JSONL")->required();
    replay->add_option("--control-hz", replay_control_hz, "control rate for the replay");
    replay->add_option("--report", replay_report, "write EpisodeReport JSON here");

    // serve
    auto* serve = app.add_subcommand("serve", "serve the mock chunk service over TCP");
    std::string serve_host = "127.0.0.1";
    std::uint16_t serve_port = 0;
    double serve_secs = 0.0;
    Flags serve_flags;
    serve_flags.attach(serve);
    serve->add_option("--host", serve_host, "bind address");
    serve->add_option("--port", serve_port, "bind port, 0 = ephemeral");
    serve->add_option("--max-seconds", serve_secs, "stop after this long; 0 = run until SIGINT");

    // probe
    auto* probe = app.add_subcommand("probe", "send one request to a live service");
    std::string probe_host = "127.0.0.1";
    std::uint16_t probe_port = 0;
    std::uint64_t probe_step = 0;
    std::size_t probe_bytes = 8192;
    double probe_noise = 0.0;
    std::uint64_t probe_obs_seed = 42;
    probe->add_option("--host", probe_host);
    probe->add_option("--port", probe_port)->required();
    probe->add_option("--step", probe_step, "control tick to ask about");
    probe->add_option("--bytes", probe_bytes, "observation payload size");
    probe->add_option("--noise", probe_noise, "observation corruption");
    probe->add_option("--obs-seed", probe_obs_seed);

    // compare
    auto* compare = app.add_subcommand("compare", "pairwise ratios across report JSON files");
    std::vector<std::string> compare_files;
    compare->add_option("files", compare_files, "EpisodeReport JSON files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const AppConfig cfg = run_flags.build();
            const Trajectory traj = generate_trajectory(cfg.to_scenario());
            if (!run_emit_traj.empty()) write_trajectory_jsonl(run_emit_traj, traj);
            const SimConfig sim = cfg.to_sim_config();
            if (run_realtime_mode) {
                const RealtimeStats st = run_realtime(traj, sim, run_time_scale);
                std::printf(
                    "realtime: %llu sensor ticks, %llu control ticks, %llu dispatches, "
                    "%llu/%llu stale snapshot reads, rows %llu exec / %llu enq, %.1f ms wall\n",
                    static_cast<unsigned long long>(st.sensor_ticks),
                    static_cast<unsigned long long>(st.control_ticks),
                    static_cast<unsigned long long>(st.dispatches),
                    static_cast<unsigned long long>(st.stale_reads),
                    static_cast<unsigned long long>(st.snapshot_reads),
                    static_cast<unsigned long long>(st.rows_executed),
                    static_cast<unsigned long long>(st.rows_enqueued), st.wall_ms);
                return 0;
            }
            auto transport = make_transport(run_connect);
            SimConfig sim2 = sim;
            sim2.keep_trace = true;
            const EpisodeReport rep = run_episode(traj, sim2, transport.get());
            print_report(rep);
            if (!run_report.empty()) write_report_json(run_report, rep, run_trace);
            if (!run_csv.empty()) write_csv(run_csv, {rep});
        } else if (bench->parsed()) {
            AppConfig cfg = bench_flags.build();
            const Trajectory traj = generate_trajectory(cfg.to_scenario());
            const char* names[] = {"edge_only", "cloud_only", "vision_entropy", "rapid"};
            if (bench_fit_total > 0.0) {
                AppConfig probe_cfg = cfg;
                probe_cfg.policy = "vision_entropy";
                probe_cfg.routing_overhead_ms = 0.0;
                const EpisodeReport vis = run_episode(traj, probe_cfg.to_sim_config());
                cfg.routing_overhead_ms = fit_routing_overhead(vis, bench_fit_total);
                std::printf("fitted routing_overhead_ms = %.3f\n", cfg.routing_overhead_ms);
            }
            std::vector<EpisodeReport> reps;
            for (const char* name : names) {
                AppConfig pc = cfg;
                pc.policy = name;
                reps.push_back(run_episode(traj, pc.to_sim_config()));
            }
            std::cout << render_table(reps);
            std::cout << compare_runs(reps).dump(2) << "\n";
            if (!bench_report.empty()) {
                nlohmann::json j;
                j["comparison"] = compare_runs(reps);
                j["reports"] = nlohmann::json::array();
                for (const auto& r : reps) j["reports"].push_back(report_to_json(r));
                std::ofstream out(bench_report);
                if (!out) throw IoError("cannot write " + bench_report);
                out << j.dump(2) << "\n";
            }
            if (!bench_csv.empty()) write_csv(bench_csv, reps);
        } else if (sweep->parsed()) {
            AppConfig cfg = sweep_flags.build();
            cfg.policy = "rapid";
            const Trajectory traj = generate_trajectory(cfg.to_scenario());
            std::vector<EpisodeReport> reps;
            std::printf("%10s %10s %9s %9s %9s %12s\n", "theta_comp", "theta_red", "trigger",
                        "dispatch", "preempt", "total_ms");
            for (double tc : sweep_tc) {
                for (double tr : sweep_tr) {
                    AppConfig pc = cfg;
                    pc.theta_comp = tc;
                    pc.theta_red = tr;
                    EpisodeReport rep = run_episode(traj, pc.to_sim_config());
                    std::printf("%10.3f %10.3f %9llu %9llu %9llu %12.1f\n", tc, tr,
                                static_cast<unsigned long long>(rep.trigger_count),
                                static_cast<unsigned long long>(rep.dispatch_count),
                                static_cast<unsigned long long>(rep.preemptions),
                                rep.total_mean_ms);
                    rep.preset += "|tc=" + std::to_string(tc) + ",tr=" + std::to_string(tr);
                    reps.push_back(std::move(rep));
                }
            }
            if (!sweep_csv.empty()) write_csv(sweep_csv, reps);
        } else if (replay->parsed()) {
            const AppConfig cfg = replay_flags.build();
            const Trajectory traj = read_trajectory_jsonl(replay_input, replay_control_hz);
            const EpisodeReport rep = run_episode(traj, cfg.to_sim_config());
            print_report(rep);
            if (!replay_report.empty()) write_report_json(replay_report, rep);
        } else if (serve->parsed()) {
            const AppConfig cfg = serve_flags.build();
            const SimConfig sim = cfg.to_sim_config();
            MockVlaService svc(sim.model, sim.client.obs_seed);
            WireServer server(svc, serve_host, serve_port);
            std::printf("serving on %s:%u\n", serve_host.c_str(), server.port());
            std::fflush(stdout);
            std::signal(SIGINT, [](int) { g_stop = 1; });
            std::signal(SIGTERM, [](int) { g_stop = 1; });
            const auto start = std::chrono::steady_clock::now();
            while (!g_stop) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100));
                if (serve_secs > 0.0 &&
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count() > serve_secs)
                    break;
            }
            server.stop();
        } else if (probe->parsed()) {
            SocketTransport transport(probe_host, probe_port);
            wire::Request req;
            req.sequence = 1;
            req.step = probe_step;
            req.observation = make_observation(probe_obs_seed, probe_step, probe_bytes,
                                               probe_noise, 7);
            const auto t0 = std::chrono::steady_clock::now();
            const auto bytes = transport.roundtrip(wire::encode_request(req));
            const double us =
                std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
                    .count();
            const wire::Response resp = wire::decode_response(bytes.data(), bytes.size());
            std::printf("status %u, seq %llu, k=%u N=%u B=%u, %zu bytes, %.1f us round trip\n",
                        static_cast<unsigned>(resp.status),
                        static_cast<unsigned long long>(resp.sequence), resp.horizon, resp.joints,
                        resp.bins, bytes.size(), us);
            if (!resp.logits.empty()) {
                std::vector<double> row(resp.logits.begin(),
                                        resp.logits.begin() + resp.bins);
                std::printf("first row entropy: %.3f bits\n", row_entropy_bits(row));
            }
        } else if (compare->parsed()) {
            std::vector<EpisodeReport> reps;
            for (const std::string& f : compare_files) reps.push_back(read_report_json(f));
            std::cout << compare_runs(reps).dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
