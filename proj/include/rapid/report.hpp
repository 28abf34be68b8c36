#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rapid/simulator.hpp"

namespace rapid {

// Emission is deterministic: keys sort alphabetically and dumps are
// byte-identical for equal reports.
nlohmann::json report_to_json(const EpisodeReport& rep, bool include_trace = false);
EpisodeReport report_from_json(const nlohmann::json& j);

void write_report_json(const std::string& path, const EpisodeReport& rep,
                       bool include_trace = false);
EpisodeReport read_report_json(const std::string& path);

std::string report_csv_header();
std::string report_csv_row(const EpisodeReport& rep);

// Fixed-width summary table, one row per report.
std::string render_table(const std::vector<EpisodeReport>& reps);

// Pairwise total-latency ratios and load splits across runs of the same
// scenario; flags the policy with the lowest mean total. Throws ConfigError
// when scenario identities differ.
nlohmann::json compare_runs(const std::vector<EpisodeReport>& reps);

// Additional per-cloud-dispatch routing overhead (ms) that would move the
// report's mean total latency onto target_total_ms. Requires cloud cycles.
double fit_routing_overhead(const EpisodeReport& rep, double target_total_ms);

}  // namespace rapid
