#include "uavsec/linkmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsec::linkmetrics {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double sinr(double desired_rx_power_w, std::span<const double> interferer_rx_powers_w,
            const NoiseModel& noise) {
    double denom = noise.noise_power_w;
    for (double p : interferer_rx_powers_w) denom += p;
    return desired_rx_power_w / denom;
}

double egc_combine(std::span<const double> branch_amplitudes_v,
                   std::span<const double> branch_noise_w,
                   std::span<const double> branch_interference_w) {
    if (branch_amplitudes_v.empty()) {
        throw std::domain_error("egc_combine: at least one branch required");
    }
    if (branch_noise_w.size() != branch_amplitudes_v.size() ||
        branch_interference_w.size() != branch_amplitudes_v.size()) {
        throw std::domain_error("egc_combine: branch lists must have equal length");
    }
    double amp_sum = 0.0;
    double denom = 0.0;
    for (std::size_t i = 0; i < branch_amplitudes_v.size(); ++i) {
        amp_sum += branch_amplitudes_v[i];
        denom += branch_noise_w[i] + branch_interference_w[i];
    }
    return amp_sum * amp_sum / denom;
}

double shannon_rate(double sinr_linear, double bandwidth_hz) {
    return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

SecrecyResult secrecy_rate(double legit_rate_bps, std::span<const double> eve_rates_bps) {
    double max_eve = 0.0;
    for (double r : eve_rates_bps) max_eve = std::max(max_eve, r);
    return SecrecyResult{legit_rate_bps, max_eve, std::max(0.0, legit_rate_bps - max_eve)};
}

double relay_path_rate(double hop1_rate_bps, double hop2_rate_bps) {
    return std::min(hop1_rate_bps, hop2_rate_bps);
}

} // namespace uavsec::linkmetrics
