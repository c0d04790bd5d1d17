#pragma once

#include <span>
#include <string>

namespace uavsec::linkmetrics {

struct NoiseModel {
    double noise_power_w = 1e-12;
};

// Per-link snapshot for one evaluation.
struct LinkState {
    std::string tx_id;
    std::string rx_id;
    double gain_linear = 0.0;
    double rx_power_w = 0.0;
    double sinr_linear = 0.0;
    double rate_bps = 0.0;
};

struct SecrecyResult {
    double legit_rate_bps = 0.0;
    double max_eve_rate_bps = 0.0;
    double secrecy_rate_bps = 0.0;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double dbw_to_watts(double dbw);
double db_to_linear(double db);
double linear_to_db(double linear);

// desired / (noise + sum of interferers); all inputs in watts.
double sinr(double desired_rx_power_w, std::span<const double> interferer_rx_powers_w,
            const NoiseModel& noise);

// Equal gain combining across branches: (sum of amplitudes)^2 over the summed
// per-branch noise-plus-interference. Amplitudes are sqrt(received watts).
double egc_combine(std::span<const double> branch_amplitudes_v,
                   std::span<const double> branch_noise_w,
                   std::span<const double> branch_interference_w);

double shannon_rate(double sinr_linear, double bandwidth_hz);

// max(0, legit - best eavesdropper); empty eavesdropper set counts as zero.
SecrecyResult secrecy_rate(double legit_rate_bps, std::span<const double> eve_rates_bps);

// Decode-and-forward end-to-end rate: the bottleneck hop.
double relay_path_rate(double hop1_rate_bps, double hop2_rate_bps);

} // namespace uavsec::linkmetrics
