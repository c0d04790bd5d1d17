#include "uavsec/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsec::detectloc {

namespace {

constexpr double kContrastFloorDb = 3.0;
constexpr double kZeroMadSlackDb = 1e-9;

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::map<std::string, double> windowed_means(std::span<const MetricWindow> windows) {
    std::map<std::string, double> means;
    for (const auto& w : windows) {
        if (w.samples_db.empty()) {
            throw std::domain_error("detection: empty metric window for node '" + w.node_id + "'");
        }
        means[w.node_id] = mean_of(w.samples_db);
    }
    return means;
}

} // namespace

DetectionReport detect_centralized(std::span<const MetricWindow> windows, double threshold_db) {
    DetectionReport report;
    report.method = "centralized";
    report.threshold = threshold_db;
    report.statistic = windowed_means(windows);
    for (const auto& [id, mean] : report.statistic) {
        if (mean < threshold_db) report.flagged.push_back(id);
    }
    return report;
}

DetectionReport detect_distributed(std::span<const MetricWindow> windows, double k_mad) {
    if (windows.size() < 3) {
        throw std::domain_error("detect_distributed: needs at least 3 nodes");
    }
    DetectionReport report;
    report.method = "distributed";
    const auto means = windowed_means(windows);

    std::vector<double> all;
    all.reserve(means.size());
    for (const auto& [id, m] : means) all.push_back(m);
    const double med_all = median_of(all);
    std::vector<double> abs_dev;
    abs_dev.reserve(all.size());
    for (double m : all) abs_dev.push_back(std::abs(m - med_all));
    const double mad = median_of(abs_dev);
    report.threshold = k_mad * mad;

    for (const auto& [id, m] : means) {
        std::vector<double> peers;
        peers.reserve(all.size() - 1);
        for (const auto& [other, om] : means) {
            if (other != id) peers.push_back(om);
        }
        const double deficit = median_of(peers) - m;
        report.statistic[id] = deficit; // MAD units once divided; keep raw dB gap
        const bool flag = mad > 0.0 ? deficit > k_mad * mad
                                    : (med_all - m) > kZeroMadSlackDb;
        if (flag) report.flagged.push_back(id);
    }
    return report;
}

AggressorEstimate identify_uplink_aggressor(
    const VictimBlockReports& victim_reports,
    const std::map<std::string, std::vector<int>>& allocations) {
    if (allocations.empty()) {
        throw std::domain_error("identify_uplink_aggressor: no candidate allocations");
    }
    if (victim_reports.empty()) {
        throw std::domain_error("identify_uplink_aggressor: no victim reports");
    }
    AggressorEstimate best;
    bool first = true;
    for (const auto& [uav, blocks] : allocations) {
        if (blocks.empty()) {
            throw std::domain_error("identify_uplink_aggressor: empty allocation for '" + uav + "'");
        }
        double contrast_sum = 0.0;
        int victims = 0;
        for (const auto& [victim, report] : victim_reports) {
            double on_sum = 0.0, off_sum = 0.0;
            int on_n = 0, off_n = 0;
            for (std::size_t rb = 0; rb < report.size(); ++rb) {
                const bool allocated =
                    std::find(blocks.begin(), blocks.end(), static_cast<int>(rb)) != blocks.end();
                if (allocated) {
                    on_sum += report[rb];
                    ++on_n;
                } else {
                    off_sum += report[rb];
                    ++off_n;
                }
            }
            if (on_n == 0 || off_n == 0) continue;
            contrast_sum += on_sum / on_n - off_sum / off_n;
            ++victims;
        }
        if (victims == 0) continue;
        const double contrast = contrast_sum / victims;
        if (first || contrast > best.contrast_db) {
            best.uav_id = uav;
            best.contrast_db = contrast;
            first = false;
        }
    }
    if (first || best.contrast_db <= kContrastFloorDb) {
        return AggressorEstimate{}; // none identified
    }
    return best;
}

} // namespace uavsec::detectloc
