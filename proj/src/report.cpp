#include "rapid/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rapid {

using nlohmann::json;

namespace {

json side_to_json(const SideStats& s) {
    return json{{"mean_ms", s.mean_ms},
                {"p50_ms", s.p50_ms},
                {"p99_ms", s.p99_ms},
                {"total_ms", s.total_ms}};
}

SideStats side_from_json(const json& j) {
    SideStats s;
    s.mean_ms = j.at("mean_ms").get<double>();
    s.p50_ms = j.at("p50_ms").get<double>();
    s.p99_ms = j.at("p99_ms").get<double>();
    s.total_ms = j.at("total_ms").get<double>();
    return s;
}

}  // namespace

json report_to_json(const EpisodeReport& r, bool include_trace) {
    json j;
    j["policy"] = r.policy;
    j["preset"] = r.preset;
    j["scenario_key"] = r.scenario_key;
    j["seed"] = r.seed;
    j["noise_level"] = r.noise_level;
    j["sensor_ticks"] = r.sensor_ticks;
    j["control_ticks"] = r.control_ticks;
    j["trigger_count"] = r.trigger_count;
    j["dispatch_count"] = r.dispatch_count;
    j["depletion_refills"] = r.depletion_refills;
    j["anomaly_dispatches"] = r.anomaly_dispatches;
    j["entropy_offloads"] = r.entropy_offloads;
    j["preemptions"] = r.preemptions;
    j["cloud_requests"] = r.cloud_requests;
    j["edge_requests"] = r.edge_requests;
    j["timeouts"] = r.timeouts;
    j["failed_requests"] = r.failed_requests;
    j["chunk_cycles"] = r.chunk_cycles;
    j["cloud_cycles"] = r.cloud_cycles;
    j["edge_cycles"] = r.edge_cycles;
    j["cloud_latency_ms"] = side_to_json(r.cloud);
    j["edge_latency_ms"] = side_to_json(r.edge);
    j["routing_ms"] = side_to_json(r.routing);
    j["total_mean_ms"] = r.total_mean_ms;
    j["total_std_ms"] = r.total_std_ms;
    j["total_sum_ms"] = r.total_sum_ms;
    j["rows_enqueued"] = r.rows_enqueued;
    j["rows_executed"] = r.rows_executed;
    j["rows_discarded"] = r.rows_discarded;
    j["rows_remaining"] = r.rows_remaining;
    j["stall_ticks"] = r.stall_ticks;
    j["load_cloud_gb"] = r.load_cloud_gb;
    j["load_edge_gb"] = r.load_edge_gb;
    j["decision_hash"] = r.decision_hash;
    if (include_trace) {
        json arr = json::array();
        for (const TraceEntry& t : r.trace) {
            json e;
            e["control_tick"] = t.control_tick;
            e["phase"] = phase_name(t.phase);
            e["trigger"] = t.trigger;
            e["dispatch"] = t.dispatch;
            e["issued"] = t.issued;
            e["cause"] = t.cause == RequestCause::depletion  ? "depletion"
                         : t.cause == RequestCause::anomaly ? "anomaly"
                                                            : "entropy";
            e["pop"] = t.pop;
            e["chunk_seq"] = t.chunk_seq;
            e["row_index"] = t.row_index;
            e["entropy_bits"] = t.entropy_bits;
            arr.push_back(std::move(e));
        }
        j["trace"] = std::move(arr);
    }
    return j;
}

EpisodeReport report_from_json(const json& j) {
    EpisodeReport r;
    r.policy = j.at("policy").get<std::string>();
    r.preset = j.value("preset", "");
    r.scenario_key = j.at("scenario_key").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.noise_level = j.at("noise_level").get<double>();
    r.sensor_ticks = j.at("sensor_ticks").get<std::uint64_t>();
    r.control_ticks = j.at("control_ticks").get<std::uint64_t>();
    r.trigger_count = j.at("trigger_count").get<std::uint64_t>();
    r.dispatch_count = j.at("dispatch_count").get<std::uint64_t>();
    r.depletion_refills = j.at("depletion_refills").get<std::uint64_t>();
    r.anomaly_dispatches = j.at("anomaly_dispatches").get<std::uint64_t>();
    r.entropy_offloads = j.at("entropy_offloads").get<std::uint64_t>();
    r.preemptions = j.at("preemptions").get<std::uint64_t>();
    r.cloud_requests = j.at("cloud_requests").get<std::uint64_t>();
    r.edge_requests = j.at("edge_requests").get<std::uint64_t>();
    r.timeouts = j.at("timeouts").get<std::uint64_t>();
    r.failed_requests = j.at("failed_requests").get<std::uint64_t>();
    r.chunk_cycles = j.at("chunk_cycles").get<std::uint64_t>();
    r.cloud_cycles = j.at("cloud_cycles").get<std::uint64_t>();
    r.edge_cycles = j.at("edge_cycles").get<std::uint64_t>();
    r.cloud = side_from_json(j.at("cloud_latency_ms"));
    r.edge = side_from_json(j.at("edge_latency_ms"));
    r.routing = side_from_json(j.at("routing_ms"));
    r.total_mean_ms = j.at("total_mean_ms").get<double>();
    r.total_std_ms = j.at("total_std_ms").get<double>();
    r.total_sum_ms = j.at("total_sum_ms").get<double>();
    r.rows_enqueued = j.at("rows_enqueued").get<std::uint64_t>();
    r.rows_executed = j.at("rows_executed").get<std::uint64_t>();
    r.rows_discarded = j.at("rows_discarded").get<std::uint64_t>();
    r.rows_remaining = j.at("rows_remaining").get<std::uint64_t>();
    r.stall_ticks = j.at("stall_ticks").get<std::uint64_t>();
    r.load_cloud_gb = j.at("load_cloud_gb").get<double>();
    r.load_edge_gb = j.at("load_edge_gb").get<double>();
    r.decision_hash = j.at("decision_hash").get<std::uint64_t>();
    return r;
}

void write_report_json(const std::string& path, const EpisodeReport& rep, bool include_trace) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << report_to_json(rep, include_trace).dump(2) << "\n";
}

EpisodeReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return report_from_json(j);
}

std::string report_csv_header() {
    return "policy,preset,scenario_key,seed,noise_level,sensor_ticks,control_ticks,"
           "trigger_count,dispatch_count,depletion_refills,anomaly_dispatches,entropy_offloads,"
           "preemptions,cloud_requests,edge_requests,timeouts,failed_requests,chunk_cycles,"
           "cloud_cycles,edge_cycles,cloud_mean_ms,cloud_p50_ms,cloud_p99_ms,cloud_total_ms,"
           "edge_mean_ms,edge_p50_ms,edge_p99_ms,edge_total_ms,routing_mean_ms,routing_total_ms,"
           "total_mean_ms,total_std_ms,total_sum_ms,rows_enqueued,rows_executed,rows_discarded,"
           "rows_remaining,stall_ticks,load_cloud_gb,load_edge_gb,decision_hash";
}

std::string report_csv_row(const EpisodeReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << r.policy << ',' << r.preset << ',' << r.scenario_key << ',' << r.seed << ','
       << r.noise_level << ',' << r.sensor_ticks << ',' << r.control_ticks << ','
       << r.trigger_count << ',' << r.dispatch_count << ',' << r.depletion_refills << ','
       << r.anomaly_dispatches << ',' << r.entropy_offloads << ',' << r.preemptions << ','
       << r.cloud_requests << ',' << r.edge_requests << ',' << r.timeouts << ','
       << r.failed_requests << ',' << r.chunk_cycles << ',' << r.cloud_cycles << ','
       << r.edge_cycles << ',' << r.cloud.mean_ms << ',' << r.cloud.p50_ms << ','
       << r.cloud.p99_ms << ',' << r.cloud.total_ms << ',' << r.edge.mean_ms << ','
       << r.edge.p50_ms << ',' << r.edge.p99_ms << ',' << r.edge.total_ms << ','
       << r.routing.mean_ms << ',' << r.routing.total_ms << ',' << r.total_mean_ms << ','
       << r.total_std_ms << ',' << r.total_sum_ms << ',' << r.rows_enqueued << ','
       << r.rows_executed << ',' << r.rows_discarded << ',' << r.rows_remaining << ','
       << r.stall_ticks << ',' << r.load_cloud_gb << ',' << r.load_edge_gb << ','
       << r.decision_hash;
    return os.str();
}

std::string render_table(const std::vector<EpisodeReport>& reps) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %14s %14s %20s %11s %10s %10s\n", "Policy",
                  "Cloud Lat.(ms)", "Edge Lat.(ms)", "Total Lat.(ms)", "Routing(ms)",
                  "Cloud(GB)", "Edge(GB)");
    os << line;
    os << std::string(100, '-') << "\n";
    for (const EpisodeReport& r : reps) {
        char total[48];
        std::snprintf(total, sizeof(total), "%.1f +- %.1f", r.total_mean_ms, r.total_std_ms);
        std::snprintf(line, sizeof(line), "%-16s %14.1f %14.1f %20s %11.1f %10.1f %10.1f\n",
                      r.policy.c_str(), r.cloud.mean_ms, r.edge.mean_ms, total,
                      r.routing.mean_ms, r.load_cloud_gb, r.load_edge_gb);
        os << line;
    }
    return os.str();
}

nlohmann::json compare_runs(const std::vector<EpisodeReport>& reps) {
    if (reps.size() < 2) throw ConfigError("compare_runs: need at least two reports");
    for (std::size_t i = 1; i < reps.size(); ++i)
        if (reps[i].scenario_key != reps[0].scenario_key)
            throw ConfigError("compare_runs: scenario mismatch: '" + reps[i].scenario_key +
                              "' vs '" + reps[0].scenario_key + "'");
    json out;
    out["scenario_key"] = reps[0].scenario_key;
    json pairs = json::array();
    for (std::size_t i = 0; i < reps.size(); ++i) {
        for (std::size_t k = i + 1; k < reps.size(); ++k) {
            json p;
            p["a"] = reps[i].policy;
            p["b"] = reps[k].policy;
            p["total_ratio_a_over_b"] =
                reps[k].total_mean_ms > 0.0 ? reps[i].total_mean_ms / reps[k].total_mean_ms : 0.0;
            pairs.push_back(std::move(p));
        }
    }
    out["pairs"] = std::move(pairs);
    std::size_t best = 0;
    for (std::size_t i = 1; i < reps.size(); ++i)
        if (reps[i].total_mean_ms < reps[best].total_mean_ms) best = i;
    out["best_policy"] = reps[best].policy;
    json loads = json::array();
    for (const EpisodeReport& r : reps) {
        json l;
        l["policy"] = r.policy;
        l["cloud_gb"] = r.load_cloud_gb;
        l["edge_gb"] = r.load_edge_gb;
        loads.push_back(std::move(l));
    }
    out["loads"] = std::move(loads);
    return out;
}

double fit_routing_overhead(const EpisodeReport& rep, double target_total_ms) {
    if (rep.cloud_cycles == 0) throw ConfigError("fit_routing_overhead: no cloud cycles to carry it");
    if (rep.chunk_cycles == 0) throw ConfigError("fit_routing_overhead: empty report");
    return (target_total_ms - rep.total_mean_ms) * static_cast<double>(rep.chunk_cycles) /
           static_cast<double>(rep.cloud_cycles);
}

}  // namespace rapid
