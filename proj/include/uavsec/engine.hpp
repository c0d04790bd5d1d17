#pragma once

#include "uavsec/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uavsec::engine {

struct LinkStat {
    double mean_gain = 0.0;
    double mean_sinr_db = 0.0; // linear-mean SINR in dB
    double mean_rate_bps = 0.0;
};

struct StepRecord {
    double t = 0.0;
    std::map<std::string, scene::Position3D> positions;
    std::string serving_bs;
    std::string serving_reason;
    std::map<std::string, LinkStat> links; // key "tx>rx"
    std::map<std::string, linkmetrics::SecrecyResult> per_bs_direct;
    double rate_direct_bps = 0.0;   // primary BS -> user
    double rate_relay_bps = 0.0;    // bottleneck hop through the relay
    double rate_hotzone_bps = 0.0;  // combined-receiver rate
    linkmetrics::SecrecyResult secrecy_direct;   // primary BS
    linkmetrics::SecrecyResult secrecy_relay;    // relay policy output
    linkmetrics::SecrecyResult secrecy_handover; // serving BS
    double user_sinr_db = 0.0; // serving downlink, the detection metric
    std::vector<std::string> detect_flags;
    std::string mitigation_state = "-";
    // Worst uplink interference seen at each victim BS this step (dBm,
    // fading-averaged, mitigation applied). -inf once the aggressor is denied.
    std::map<std::string, double> uplink_victim_interference_dbm;
};

struct CurveStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct RunSummary {
    std::string name;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::size_t steps = 0;
    std::map<std::string, CurveStats> curves;
    int handover_count = 0;
    std::vector<double> handover_times;
    std::map<std::string, std::size_t> first_detection_step;
    std::vector<std::string> mitigation_events;
};

struct RunOptions {
    bool fading_disabled = false; // unit amplitude, majority-vote LoS
    int threads = 1;              // per-link sampling concurrency
    std::optional<std::uint64_t> seed_override;
};

struct RunResult {
    ScenarioConfig config; // effective (seed override applied)
    std::vector<StepRecord> records;
    RunSummary summary;
};

// Deterministic time-stepped simulation: (config, master_seed) fully
// determines every output bit, independent of thread count.
RunResult run(const ScenarioConfig& cfg, const RunOptions& opts = {});

// ---- Emission --------------------------------------------------------------

// CSV body exactly as written to disk; exposed for byte-identity checks.
std::string format_records_csv(const RunResult& result);

void emit_records_csv(const RunResult& result, const std::string& path);
void emit_records_json(const RunResult& result, const std::string& path);
void emit_summary_json(const RunResult& result, const std::string& path);
void emit_effective_config(const RunResult& result, const std::string& path);

// ---- Parameter sweeps --------------------------------------------------------

struct SweepRow {
    double value = 0.0;
    std::uint64_t seed = 0;
    RunSummary summary;
};

// Runs the base scenario once per value with the addressed numeric field
// replaced and the seed advanced by the value index.
std::vector<SweepRow> sweep(const nlohmann::json& base_scenario, const std::string& param_path,
                            std::span<const double> values, const RunOptions& opts = {});

std::string format_sweep_csv(const std::string& param_path, std::span<const SweepRow> rows);

} // namespace uavsec::engine
