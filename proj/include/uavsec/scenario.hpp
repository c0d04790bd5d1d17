#pragma once

#include "uavsec/channel.hpp"
#include "uavsec/linkmetrics.hpp"
#include "uavsec/policies.hpp"
#include "uavsec/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace uavsec::engine {

struct RelayPolicy {
    bool enabled = false;
    policies::RelayMode mode = policies::RelayMode::forced_relay;
    bool half_duplex = false; // halves the end-to-end relay rate when set
};

struct HandoverPolicy {
    bool enabled = false;
    double hysteresis_bps = 0.0;
};

struct HotzonePolicy {
    bool enabled = false;
    bool egc_fallback = true;
};

struct SafezonePolicy {
    bool enabled = false;
    bool auto_sectors = true; // aim sectors at known eavesdroppers
    policies::SafezoneConfig config;
};

struct UplinkPolicy {
    bool enabled = false;
    policies::UplinkMitigationKind kind = policies::UplinkMitigationKind::power_control;
    double interference_threshold_dbm = -90.0;
    int rb_count = 24;
    double uav_rb_share = 0.1;
};

struct DetectionPolicy {
    bool enabled = false;
    std::string method = "centralized"; // or "distributed"
    double threshold_db = -10.0;
    int window_len = 10;
    double k_mad = 3.0;
};

struct PolicyConfig {
    RelayPolicy relay;
    HandoverPolicy handover;
    HotzonePolicy hotzone;
    SafezonePolicy safezone;
    UplinkPolicy uplink;
    DetectionPolicy detection;
};

struct ScenarioConfig {
    std::string name;
    double duration_s = 0.0;
    double timestep_s = 0.1;
    std::uint64_t master_seed = 1;
    double bandwidth_hz = 1.0e7;
    linkmetrics::NoiseModel noise;
    channel::ChannelParams channel;
    std::vector<scene::NodeSpec> nodes;
    PolicyConfig policies;
    std::vector<std::string> outputs; // CSV column selectors, fixed order
};

// The full column vocabulary in emission order.
const std::vector<std::string>& known_output_columns();

// Parse + validate a scenario file. Unknown fields are rejected, defaults are
// filled in, and every invariant is checked up front.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const nlohmann::json& j);

// Effective configuration with all defaults resolved.
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

// Stable fingerprint of the effective configuration.
std::string config_digest(const ScenarioConfig& cfg);

} // namespace uavsec::engine
