#include "uavsec/scenario.hpp"

#include "uavsec/errors.hpp"
#include "uavsec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace uavsec::engine {

using nlohmann::json;

namespace {

// Strict-mode guard: every object must only contain fields we know about.
void reject_unknown_fields(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw config_error("unknown field '" + key + "' in " + where);
        }
    }
}

double get_number(const json& obj, const char* field, const std::string& where) {
    if (!obj.at(field).is_number()) {
        throw config_error("field '" + std::string(field) + "' in " + where + " must be a number");
    }
    return obj.at(field).get<double>();
}

scene::Vec3 parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number()) {
        throw config_error(where + " must be a 3-element numeric array [x, y, z]");
    }
    return scene::Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

scene::MobilityPolicy parse_mobility(const json& j, const std::string& where) {
    scene::MobilityPolicy m;
    if (!j.is_object()) throw config_error(where + " must be an object");
    const std::string kind = j.value("kind", "static");
    if (kind == "static") {
        reject_unknown_fields(j, {"kind"}, where);
        m.kind = scene::MobilityKind::static_;
    } else if (kind == "linear") {
        reject_unknown_fields(j, {"kind", "velocity"}, where);
        m.kind = scene::MobilityKind::linear;
        m.velocity = parse_vec3(j.at("velocity"), where + ".velocity");
    } else if (kind == "follow") {
        reject_unknown_fields(j, {"kind", "target", "offset"}, where);
        m.kind = scene::MobilityKind::follow;
        m.follow_target = j.at("target").get<std::string>();
        if (j.contains("offset")) {
            m.follow_offset = parse_vec3(j.at("offset"), where + ".offset");
        } else {
            m.follow_offset = scene::Vec3{0.0, 0.0, 20.0};
        }
    } else {
        throw config_error(where + ": unknown mobility kind '" + kind + "'");
    }
    return m;
}

scene::NodeSpec parse_node(const json& j, const std::string& where) {
    reject_unknown_fields(
        j, {"id", "role", "position", "tx_power_dbm", "tx_power_dbw", "mobility"}, where);
    scene::NodeSpec n;
    n.id = j.at("id").get<std::string>();
    const std::string role = j.at("role").get<std::string>();
    const auto parsed = scene::role_from_name(role);
    if (!parsed.has_value()) {
        throw config_error(where + ": unknown role '" + role + "'");
    }
    n.role = *parsed;
    n.initial_position = parse_vec3(j.at("position"), where + ".position");
    if (n.initial_position.z < 0.0) {
        throw config_error(where + ": height must be >= 0");
    }
    if (j.contains("tx_power_dbm") && j.contains("tx_power_dbw")) {
        throw config_error(where + ": give tx_power_dbm or tx_power_dbw, not both");
    }
    if (j.contains("tx_power_dbm")) {
        n.tx_power_dbm = get_number(j, "tx_power_dbm", where);
    } else if (j.contains("tx_power_dbw")) {
        n.tx_power_dbm = get_number(j, "tx_power_dbw", where) + 30.0;
    }
    if (n.tx_power_dbm.has_value() && !std::isfinite(*n.tx_power_dbm)) {
        throw config_error(where + ": transmit power must be finite");
    }
    if (j.contains("mobility")) {
        n.mobility = parse_mobility(j.at("mobility"), where + ".mobility");
    }
    return n;
}

channel::ChannelParams parse_channel(const json& j) {
    channel::ChannelParams p;
    reject_unknown_fields(j,
                          {"carrier_frequency_hz", "ground_pathloss_exponent",
                           "reference_distance_m", "a2g_a", "a2g_b", "eta_los_db", "eta_nlos_db",
                           "rician_k_db", "fading_samples_per_step", "aerial_z_threshold_m"},
                          "channel");
    p.carrier_frequency_hz = j.value("carrier_frequency_hz", p.carrier_frequency_hz);
    p.ground_pathloss_exponent = j.value("ground_pathloss_exponent", p.ground_pathloss_exponent);
    p.reference_distance_m = j.value("reference_distance_m", p.reference_distance_m);
    p.a2g_a = j.value("a2g_a", p.a2g_a);
    p.a2g_b = j.value("a2g_b", p.a2g_b);
    p.eta_los_db = j.value("eta_los_db", p.eta_los_db);
    p.eta_nlos_db = j.value("eta_nlos_db", p.eta_nlos_db);
    p.rician_k_db = j.value("rician_k_db", p.rician_k_db);
    p.fading_samples_per_step = j.value("fading_samples_per_step", p.fading_samples_per_step);
    p.aerial_z_threshold_m = j.value("aerial_z_threshold_m", p.aerial_z_threshold_m);
    return p;
}

PolicyConfig parse_policies(const json& j) {
    PolicyConfig p;
    reject_unknown_fields(j, {"relay", "handover", "hotzone", "safezone", "uplink", "detection"},
                          "policies");
    if (j.contains("relay")) {
        const auto& r = j.at("relay");
        reject_unknown_fields(r, {"enabled", "mode", "half_duplex"}, "policies.relay");
        p.relay.enabled = r.value("enabled", false);
        const std::string mode = r.value("mode", "forced_relay");
        if (mode == "forced_relay") {
            p.relay.mode = policies::RelayMode::forced_relay;
        } else if (mode == "best_of") {
            p.relay.mode = policies::RelayMode::best_of;
        } else {
            throw config_error("policies.relay.mode must be 'forced_relay' or 'best_of'");
        }
        p.relay.half_duplex = r.value("half_duplex", false);
    }
    if (j.contains("handover")) {
        const auto& h = j.at("handover");
        reject_unknown_fields(h, {"enabled", "hysteresis_bps"}, "policies.handover");
        p.handover.enabled = h.value("enabled", false);
        p.handover.hysteresis_bps = h.value("hysteresis_bps", 0.0);
    }
    if (j.contains("hotzone")) {
        const auto& h = j.at("hotzone");
        reject_unknown_fields(h, {"enabled", "egc_fallback"}, "policies.hotzone");
        p.hotzone.enabled = h.value("enabled", false);
        p.hotzone.egc_fallback = h.value("egc_fallback", true);
    }
    if (j.contains("safezone")) {
        const auto& s = j.at("safezone");
        reject_unknown_fields(
            s, {"enabled", "an_power_dbm", "sector_width_deg", "guard_angle_deg", "sector_centers_deg"},
            "policies.safezone");
        p.safezone.enabled = s.value("enabled", false);
        p.safezone.config.an_power_dbm = s.value("an_power_dbm", 20.0);
        p.safezone.config.sector_width_deg = s.value("sector_width_deg", 30.0);
        p.safezone.config.guard_angle_deg = s.value("guard_angle_deg", 10.0);
        if (s.contains("sector_centers_deg")) {
            const auto& centers = s.at("sector_centers_deg");
            if (centers.is_string()) {
                if (centers.get<std::string>() != "auto") {
                    throw config_error("policies.safezone.sector_centers_deg must be 'auto' "
                                       "or a list of azimuths");
                }
                p.safezone.auto_sectors = true;
            } else if (centers.is_array()) {
                p.safezone.auto_sectors = false;
                for (const auto& c : centers) {
                    p.safezone.config.sector_centers_deg.push_back(c.get<double>());
                }
            } else {
                throw config_error("policies.safezone.sector_centers_deg must be 'auto' "
                                   "or a list of azimuths");
            }
        }
        if (p.safezone.config.sector_width_deg <= 0.0 ||
            p.safezone.config.sector_width_deg > 180.0) {
            throw config_error("policies.safezone.sector_width_deg must be in (0, 180]");
        }
        if (p.safezone.config.guard_angle_deg < 0.0) {
            throw config_error("policies.safezone.guard_angle_deg must be >= 0");
        }
    }
    if (j.contains("uplink")) {
        const auto& u = j.at("uplink");
        reject_unknown_fields(
            u, {"enabled", "kind", "interference_threshold_dbm", "rb_count", "uav_rb_share"},
            "policies.uplink");
        p.uplink.enabled = u.value("enabled", false);
        const std::string kind = u.value("kind", "power_control");
        if (kind == "deny") {
            p.uplink.kind = policies::UplinkMitigationKind::deny;
        } else if (kind == "dedicated_resources") {
            p.uplink.kind = policies::UplinkMitigationKind::dedicated_resources;
        } else if (kind == "power_control") {
            p.uplink.kind = policies::UplinkMitigationKind::power_control;
        } else {
            throw config_error("policies.uplink.kind must be deny, dedicated_resources "
                               "or power_control");
        }
        p.uplink.interference_threshold_dbm = u.value("interference_threshold_dbm", -90.0);
        p.uplink.rb_count = u.value("rb_count", 24);
        p.uplink.uav_rb_share = u.value("uav_rb_share", 0.1);
        if (p.uplink.rb_count < 2) {
            throw config_error("policies.uplink.rb_count must be >= 2");
        }
        if (p.uplink.uav_rb_share <= 0.0 || p.uplink.uav_rb_share >= 1.0) {
            throw config_error("policies.uplink.uav_rb_share must be in (0, 1)");
        }
    }
    if (j.contains("detection")) {
        const auto& d = j.at("detection");
        reject_unknown_fields(d, {"enabled", "method", "threshold_db", "window_len", "k_mad"},
                              "policies.detection");
        p.detection.enabled = d.value("enabled", false);
        p.detection.method = d.value("method", "centralized");
        if (p.detection.method != "centralized" && p.detection.method != "distributed") {
            throw config_error("policies.detection.method must be centralized or distributed");
        }
        p.detection.threshold_db = d.value("threshold_db", -10.0);
        p.detection.window_len = d.value("window_len", 10);
        p.detection.k_mad = d.value("k_mad", 3.0);
        if (p.detection.window_len < 1) {
            throw config_error("policies.detection.window_len must be >= 1");
        }
    }
    return p;
}

void validate_scenario(const ScenarioConfig& cfg) {
    if (!(cfg.duration_s > 0.0)) throw config_error("duration_s must be > 0");
    if (!(cfg.timestep_s > 0.0)) throw config_error("timestep_s must be > 0");
    if (!(cfg.bandwidth_hz > 0.0)) throw config_error("bandwidth_hz must be > 0");
    if (!(cfg.noise.noise_power_w > 0.0)) throw config_error("noise.noise_power_w must be > 0");
    channel::validate(cfg.channel);

    std::set<std::string> ids;
    int base_stations = 0;
    int users = 0;
    for (const auto& n : cfg.nodes) {
        if (!ids.insert(n.id).second) {
            throw config_error("duplicate node id '" + n.id + "'");
        }
        if (n.role == scene::Role::base_station) ++base_stations;
        if (n.role == scene::Role::user) ++users;
        if (scene::role_transmits(n.role) && !n.tx_power_dbm.has_value()) {
            throw config_error("node '" + n.id + "' (" + scene::role_name(n.role) +
                               ") needs a transmit power");
        }
        if (n.role == scene::Role::eavesdropper && n.tx_power_dbm.has_value()) {
            throw config_error("eavesdropper '" + n.id + "' must not carry a transmit power");
        }
    }
    if (base_stations < 1) throw config_error("scenario needs at least one base_station");
    if (users < 1) throw config_error("scenario needs at least one user");
    scene::validate_mobility(cfg.nodes);

    const auto& known = known_output_columns();
    for (const auto& col : cfg.outputs) {
        if (std::find(known.begin(), known.end(), col) == known.end()) {
            throw config_error("unknown output column '" + col + "'");
        }
    }
}

} // namespace

const std::vector<std::string>& known_output_columns() {
    static const std::vector<std::string> cols = {
        "t_s",
        "user_x_m",
        "user_y_m",
        "user_z_m",
        "serving_bs",
        "rate_direct_bps",
        "rate_relay_bps",
        "rate_hotzone_bps",
        "secrecy_direct_bps",
        "secrecy_relay_bps",
        "secrecy_handover_bps",
        "detect_flags",
        "mitigation_state",
    };
    return cols;
}

ScenarioConfig parse_scenario(const json& j) {
    if (!j.is_object()) throw config_error("scenario must be a JSON object");
    reject_unknown_fields(j,
                          {"name", "duration_s", "timestep_s", "master_seed", "bandwidth_hz",
                           "noise", "channel", "nodes", "policies", "outputs"},
                          "scenario");
    ScenarioConfig cfg;
    try {
        cfg.name = j.at("name").get<std::string>();
        cfg.duration_s = get_number(j, "duration_s", "scenario");
        cfg.timestep_s = j.value("timestep_s", 0.1);
        cfg.master_seed = j.value("master_seed", std::uint64_t{1});
        cfg.bandwidth_hz = j.value("bandwidth_hz", 1.0e7);
        if (j.contains("noise")) {
            reject_unknown_fields(j.at("noise"), {"noise_power_w"}, "noise");
            cfg.noise.noise_power_w = j.at("noise").value("noise_power_w", 1e-12);
        }
        if (j.contains("channel")) cfg.channel = parse_channel(j.at("channel"));
        if (!j.contains("nodes") || !j.at("nodes").is_array()) {
            throw config_error("scenario needs a 'nodes' array");
        }
        int idx = 0;
        for (const auto& nj : j.at("nodes")) {
            cfg.nodes.push_back(parse_node(nj, "nodes[" + std::to_string(idx) + "]"));
            ++idx;
        }
        if (j.contains("policies")) cfg.policies = parse_policies(j.at("policies"));
        if (j.contains("outputs")) {
            cfg.outputs = j.at("outputs").get<std::vector<std::string>>();
        } else {
            cfg.outputs = known_output_columns();
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("scenario parse error: ") + e.what());
    }
    validate_scenario(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("scenario file '" + path + "': " + e.what());
    }
    return parse_scenario(j);
}

nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
    json nodes = json::array();
    for (const auto& n : cfg.nodes) {
        json nj{{"id", n.id},
                {"role", scene::role_name(n.role)},
                {"position",
                 {n.initial_position.x, n.initial_position.y, n.initial_position.z}}};
        if (n.tx_power_dbm.has_value()) nj["tx_power_dbm"] = *n.tx_power_dbm;
        switch (n.mobility.kind) {
        case scene::MobilityKind::static_:
            nj["mobility"] = {{"kind", "static"}};
            break;
        case scene::MobilityKind::linear:
            nj["mobility"] = {{"kind", "linear"},
                              {"velocity",
                               {n.mobility.velocity.x, n.mobility.velocity.y,
                                n.mobility.velocity.z}}};
            break;
        case scene::MobilityKind::follow:
            nj["mobility"] = {{"kind", "follow"},
                              {"target", n.mobility.follow_target},
                              {"offset",
                               {n.mobility.follow_offset.x, n.mobility.follow_offset.y,
                                n.mobility.follow_offset.z}}};
            break;
        }
        nodes.push_back(std::move(nj));
    }

    json safezone_centers;
    if (cfg.policies.safezone.auto_sectors) {
        safezone_centers = "auto";
    } else {
        safezone_centers = cfg.policies.safezone.config.sector_centers_deg;
    }

    return json{
        {"name", cfg.name},
        {"duration_s", cfg.duration_s},
        {"timestep_s", cfg.timestep_s},
        {"master_seed", cfg.master_seed},
        {"bandwidth_hz", cfg.bandwidth_hz},
        {"noise", {{"noise_power_w", cfg.noise.noise_power_w}}},
        {"channel",
         {{"carrier_frequency_hz", cfg.channel.carrier_frequency_hz},
          {"ground_pathloss_exponent", cfg.channel.ground_pathloss_exponent},
          {"reference_distance_m", cfg.channel.reference_distance_m},
          {"a2g_a", cfg.channel.a2g_a},
          {"a2g_b", cfg.channel.a2g_b},
          {"eta_los_db", cfg.channel.eta_los_db},
          {"eta_nlos_db", cfg.channel.eta_nlos_db},
          {"rician_k_db", cfg.channel.rician_k_db},
          {"fading_samples_per_step", cfg.channel.fading_samples_per_step},
          {"aerial_z_threshold_m", cfg.channel.aerial_z_threshold_m}}},
        {"nodes", std::move(nodes)},
        {"policies",
         {{"relay",
           {{"enabled", cfg.policies.relay.enabled},
            {"mode",
             cfg.policies.relay.mode == policies::RelayMode::forced_relay ? "forced_relay"
                                                                          : "best_of"},
            {"half_duplex", cfg.policies.relay.half_duplex}}},
          {"handover",
           {{"enabled", cfg.policies.handover.enabled},
            {"hysteresis_bps", cfg.policies.handover.hysteresis_bps}}},
          {"hotzone",
           {{"enabled", cfg.policies.hotzone.enabled},
            {"egc_fallback", cfg.policies.hotzone.egc_fallback}}},
          {"safezone",
           {{"enabled", cfg.policies.safezone.enabled},
            {"an_power_dbm", cfg.policies.safezone.config.an_power_dbm},
            {"sector_width_deg", cfg.policies.safezone.config.sector_width_deg},
            {"guard_angle_deg", cfg.policies.safezone.config.guard_angle_deg},
            {"sector_centers_deg", safezone_centers}}},
          {"uplink",
           {{"enabled", cfg.policies.uplink.enabled},
            {"kind", policies::mitigation_kind_name(cfg.policies.uplink.kind)},
            {"interference_threshold_dbm", cfg.policies.uplink.interference_threshold_dbm},
            {"rb_count", cfg.policies.uplink.rb_count},
            {"uav_rb_share", cfg.policies.uplink.uav_rb_share}}},
          {"detection",
           {{"enabled", cfg.policies.detection.enabled},
            {"method", cfg.policies.detection.method},
            {"threshold_db", cfg.policies.detection.threshold_db},
            {"window_len", cfg.policies.detection.window_len},
            {"k_mad", cfg.policies.detection.k_mad}}}}},
        {"outputs", cfg.outputs},
    };
}

std::string config_digest(const ScenarioConfig& cfg) {
    const std::string canonical = scenario_to_json(cfg).dump();
    const std::uint64_t h = rng::fnv1a64(canonical);
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace uavsec::engine
