#pragma once

#include "uavsec/linkmetrics.hpp"
#include "uavsec/scene.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uavsec::policies {

using linkmetrics::NoiseModel;
using linkmetrics::SecrecyResult;

// ---- Secrecy-aware serving-cell selection -------------------------------

struct ServingDecision {
    std::string bs_id;
    enum class Reason { initial, secrecy_handover } reason = Reason::initial;
};

// Picks the base station with the best secrecy rate. A handover needs a
// strict improvement of at least `hysteresis_bps`; exact ties never move the
// user, and ties among candidates resolve to the lowest id.
ServingDecision select_serving_bs(const std::map<std::string, SecrecyResult>& candidates,
                                  const std::optional<ServingDecision>& current,
                                  double hysteresis_bps);

// ---- Relay evaluation ----------------------------------------------------

enum class RelayMode { forced_relay, best_of };

struct RelayChoice {
    SecrecyResult chosen;
    enum class Label { direct, relayed } label = Label::direct;
};

// forced_relay always reports the relayed result; best_of takes the higher
// secrecy rate, preferring the direct path on ties (fewer hops).
RelayChoice evaluate_relay_option(const SecrecyResult& direct, const SecrecyResult& relayed,
                                  RelayMode mode);

// ---- Hot zone ------------------------------------------------------------

// Combined-receiver rate for one evaluation: equal gain combining of the
// base-station and UAV branches, with the jammer's power present in every
// branch term. With `egc_fallback` the receiver never does worse than its
// best single branch, which keeps a dead branch from dragging the sum down.
double hotzone_rate(double bs_rx_power_w, double uav_rx_power_w,
                    std::span<const double> jammer_rx_powers_per_branch_w,
                    const NoiseModel& noise, double bandwidth_hz, bool egc_fallback);

// ---- Artificial-noise safe zone -------------------------------------------

struct SafezoneConfig {
    double an_power_dbm = 20.0;
    double sector_width_deg = 30.0;
    double guard_angle_deg = 10.0;
    std::vector<double> sector_centers_deg; // empty => auto (aim at each eavesdropper)
};

// Whether a receiver at azimuth `target_az_deg` (seen from the AN transmitter)
// is illuminated: inside some sector and outside the guard cone that protects
// the user direction.
bool an_sector_covers(double target_az_deg, double user_az_deg,
                      std::span<const double> sector_centers_deg,
                      const SafezoneConfig& cfg);

// Added interference (watts) per eavesdropper. `eve_an_gains` are the realized
// AN-UAV -> eavesdropper channel gains; uncovered eavesdroppers get zero and
// the protected user always gets zero (the guard cone is nulled).
std::vector<double> safezone_interference_w(std::span<const double> eve_azimuths_deg,
                                            std::span<const double> eve_an_gains,
                                            double user_az_deg, const SafezoneConfig& cfg);

// ---- Uplink interference mitigation ---------------------------------------

enum class UplinkMitigationKind { deny, dedicated_resources, power_control };

const char* mitigation_kind_name(UplinkMitigationKind k);

struct MitigationOutcome {
    UplinkMitigationKind kind = UplinkMitigationKind::power_control;
    std::string aggressor_id;
    bool denied = false;            // deny: aggressor unserved
    double power_delta_db = 0.0;    // power_control: reduction applied
    bool dedicated = false;         // dedicated_resources: blocks carved out
    double victim_bandwidth_factor = 1.0; // victims' usable share under dedication
};

// Applies one mitigation decision given per-victim interference reports (dBm).
// power_control reduces by exactly max(0, worst report - threshold) dB.
MitigationOutcome mitigate_uplink(const std::map<std::string, double>& victim_reports_dbm,
                                  const std::string& aggressor_id, UplinkMitigationKind kind,
                                  double threshold_dbm, double uav_rb_share = 0.1);

} // namespace uavsec::policies
