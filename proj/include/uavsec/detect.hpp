#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace uavsec::detectloc {

// Windowed per-node metric samples (SINR in dB, newest last).
struct MetricWindow {
    std::string node_id;
    std::vector<double> samples_db;
};

struct DetectionReport {
    std::vector<std::string> flagged;               // sorted by node id
    std::string method;                             // "centralized" | "distributed"
    std::map<std::string, double> statistic;        // per-node test statistic
    double threshold = 0.0;                         // value the rule compared against
};

// Central monitor: flag every node whose windowed mean falls strictly below
// the threshold.
DetectionReport detect_centralized(std::span<const MetricWindow> windows, double threshold_db);

// Peer comparison: node i is flagged when the median of its peers exceeds its
// own mean by more than k_mad times the MAD of all windowed means. A zero MAD
// (at least half the nodes identical) degenerates to flagging anything
// strictly below the common value.
DetectionReport detect_distributed(std::span<const MetricWindow> windows, double k_mad = 3.0);

// ---- Uplink aggressor identification --------------------------------------

// victim id -> per-resource-block interference (dBm), block index is position.
using VictimBlockReports = std::map<std::string, std::vector<double>>;

struct AggressorEstimate {
    std::string uav_id;        // empty when nothing clears the contrast floor
    double contrast_db = 0.0;  // allocated-vs-rest interference gap
};

// Matches interference hot spots against known per-UAV resource allocations:
// the candidate whose allocated blocks run hottest relative to the rest wins,
// provided the contrast clears 3 dB.
AggressorEstimate identify_uplink_aggressor(
    const VictimBlockReports& victim_reports,
    const std::map<std::string, std::vector<int>>& allocations);

} // namespace uavsec::detectloc
