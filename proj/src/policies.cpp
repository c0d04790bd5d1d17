#include "uavsec/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavsec::policies {

namespace {

// Smallest signed angular difference, degrees in [-180, 180].
double wrap_angle_deg(double a) {
    a = std::fmod(a, 360.0);
    if (a > 180.0) a -= 360.0;
    if (a < -180.0) a += 360.0;
    return a;
}

} // namespace

ServingDecision select_serving_bs(const std::map<std::string, SecrecyResult>& candidates,
                                  const std::optional<ServingDecision>& current,
                                  double hysteresis_bps) {
    if (candidates.empty()) {
        throw std::domain_error("select_serving_bs: no candidate base stations");
    }
    // std::map iterates in id order, so keeping the strictly-greater winner
    // resolves exact ties to the lowest id.
    auto best = candidates.begin();
    for (auto it = std::next(candidates.begin()); it != candidates.end(); ++it) {
        if (it->second.secrecy_rate_bps > best->second.secrecy_rate_bps) best = it;
    }
    if (!current.has_value()) {
        return ServingDecision{best->first, ServingDecision::Reason::initial};
    }
    auto cur = candidates.find(current->bs_id);
    if (cur == candidates.end()) {
        // Serving cell dropped out of the candidate set; reselect.
        return ServingDecision{best->first, ServingDecision::Reason::secrecy_handover};
    }
    const double gain = best->second.secrecy_rate_bps - cur->second.secrecy_rate_bps;
    if (best->first != cur->first && gain > 0.0 && gain >= hysteresis_bps) {
        return ServingDecision{best->first, ServingDecision::Reason::secrecy_handover};
    }
    return *current;
}

RelayChoice evaluate_relay_option(const SecrecyResult& direct, const SecrecyResult& relayed,
                                  RelayMode mode) {
    if (mode == RelayMode::forced_relay) {
        return RelayChoice{relayed, RelayChoice::Label::relayed};
    }
    if (relayed.secrecy_rate_bps > direct.secrecy_rate_bps) {
        return RelayChoice{relayed, RelayChoice::Label::relayed};
    }
    return RelayChoice{direct, RelayChoice::Label::direct};
}

double hotzone_rate(double bs_rx_power_w, double uav_rx_power_w,
                    std::span<const double> jammer_rx_powers_per_branch_w,
                    const NoiseModel& noise, double bandwidth_hz, bool egc_fallback) {
    const double amps[2] = {std::sqrt(bs_rx_power_w), std::sqrt(uav_rx_power_w)};
    const double noises[2] = {noise.noise_power_w, noise.noise_power_w};
    double interf[2] = {0.0, 0.0};
    for (std::size_t b = 0; b < 2 && b < jammer_rx_powers_per_branch_w.size(); ++b) {
        interf[b] = jammer_rx_powers_per_branch_w[b];
    }
    double combined = linkmetrics::egc_combine(amps, noises, interf);
    if (egc_fallback) {
        const double i0[1] = {interf[0]};
        const double i1[1] = {interf[1]};
        const double single_bs = linkmetrics::sinr(bs_rx_power_w, i0, noise);
        const double single_uav = linkmetrics::sinr(uav_rx_power_w, i1, noise);
        combined = std::max({combined, single_bs, single_uav});
    }
    return linkmetrics::shannon_rate(combined, bandwidth_hz);
}

bool an_sector_covers(double target_az_deg, double user_az_deg,
                      std::span<const double> sector_centers_deg,
                      const SafezoneConfig& cfg) {
    if (std::abs(wrap_angle_deg(target_az_deg - user_az_deg)) <= cfg.guard_angle_deg) {
        return false;
    }
    for (double center : sector_centers_deg) {
        if (std::abs(wrap_angle_deg(target_az_deg - center)) <= cfg.sector_width_deg / 2.0) {
            return true;
        }
    }
    return false;
}

std::vector<double> safezone_interference_w(std::span<const double> eve_azimuths_deg,
                                            std::span<const double> eve_an_gains,
                                            double user_az_deg, const SafezoneConfig& cfg) {
    if (eve_azimuths_deg.size() != eve_an_gains.size()) {
        throw std::domain_error("safezone_interference_w: azimuth/gain lists must match");
    }
    // Auto mode points one sector at every known eavesdropper.
    std::vector<double> centers = cfg.sector_centers_deg;
    if (centers.empty()) {
        centers.assign(eve_azimuths_deg.begin(), eve_azimuths_deg.end());
    }
    const double an_power_w = linkmetrics::dbm_to_watts(cfg.an_power_dbm);
    std::vector<double> added(eve_azimuths_deg.size(), 0.0);
    for (std::size_t i = 0; i < eve_azimuths_deg.size(); ++i) {
        if (an_sector_covers(eve_azimuths_deg[i], user_az_deg, centers, cfg)) {
            added[i] = an_power_w * eve_an_gains[i];
        }
    }
    return added;
}

const char* mitigation_kind_name(UplinkMitigationKind k) {
    switch (k) {
    case UplinkMitigationKind::deny: return "deny";
    case UplinkMitigationKind::dedicated_resources: return "dedicated_resources";
    case UplinkMitigationKind::power_control: return "power_control";
    }
    return "unknown";
}

MitigationOutcome mitigate_uplink(const std::map<std::string, double>& victim_reports_dbm,
                                  const std::string& aggressor_id, UplinkMitigationKind kind,
                                  double threshold_dbm, double uav_rb_share) {
    if (aggressor_id.empty()) {
        throw std::domain_error("mitigate_uplink: unknown aggressor id");
    }
    MitigationOutcome out;
    out.kind = kind;
    out.aggressor_id = aggressor_id;
    switch (kind) {
    case UplinkMitigationKind::deny:
        out.denied = true;
        break;
    case UplinkMitigationKind::power_control: {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& [bs, dbm] : victim_reports_dbm) worst = std::max(worst, dbm);
        out.power_delta_db = std::max(0.0, worst - threshold_dbm);
        break;
    }
    case UplinkMitigationKind::dedicated_resources:
        out.dedicated = true;
        out.victim_bandwidth_factor = 1.0 - uav_rb_share;
        break;
    }
    return out;
}

} // namespace uavsec::policies
