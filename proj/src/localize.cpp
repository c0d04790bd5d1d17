#include "uavsec/localize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace uavsec::detectloc {

namespace {

bool collinear(std::span<const RssMeasurement> ms) {
    // All sensors within numerical tolerance of one line.
    const auto& a = ms[0].sensor;
    const auto& b = ms[1].sensor;
    const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
    const double ulen = std::sqrt(ux * ux + uy * uy + uz * uz);
    if (ulen == 0.0) return true;
    for (std::size_t i = 2; i < ms.size(); ++i) {
        const double vx = ms[i].sensor.x - a.x;
        const double vy = ms[i].sensor.y - a.y;
        const double vz = ms[i].sensor.z - a.z;
        const double cx = uy * vz - uz * vy;
        const double cy = uz * vx - ux * vz;
        const double cz = ux * vy - uy * vx;
        const double dist = std::sqrt(cx * cx + cy * cy + cz * cz) / ulen;
        if (dist > 1e-6) return false;
    }
    return true;
}

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

} // namespace

double rss_fit_residual(const Position3D& candidate,
                        std::span<const RssMeasurement> measurements,
                        const ChannelParams& params, double* est_power_dbm) {
    // rss_i = P_tx - L_i(candidate) + error; optimal P_tx is the mean of
    // rss_i + L_i.
    double p_sum = 0.0;
    std::vector<double> loss(measurements.size());
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const auto cls = channel::classify_by_height(candidate, measurements[i].sensor, params);
        loss[i] = channel::mean_path_loss_db(candidate, measurements[i].sensor, cls, params);
        p_sum += measurements[i].rss_dbm + loss[i];
    }
    const double p_hat = p_sum / static_cast<double>(measurements.size());
    if (est_power_dbm != nullptr) *est_power_dbm = p_hat;
    double residual = 0.0;
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const double e = measurements[i].rss_dbm - (p_hat - loss[i]);
        residual += e * e;
    }
    return residual;
}

LocalizationEstimate rss_localize(std::span<const RssMeasurement> measurements,
                                  const ChannelParams& params, const SearchBounds& bounds,
                                  const LocalizeOptions& options) {
    if (measurements.size() < 4) {
        throw std::domain_error("rss_localize: at least 4 measurements required");
    }
    if (collinear(measurements)) {
        throw std::domain_error("rss_localize: sensor positions are collinear");
    }
    if (!(bounds.hi.x > bounds.lo.x) || !(bounds.hi.y > bounds.lo.y) ||
        !(bounds.hi.z >= bounds.lo.z)) {
        throw std::domain_error("rss_localize: degenerate search bounds");
    }

    const int n = options.coarse_cells_per_axis;
    const double dx = (bounds.hi.x - bounds.lo.x) / n;
    const double dy = (bounds.hi.y - bounds.lo.y) / n;
    const double dz = (bounds.hi.z - bounds.lo.z) / n;

    // Coarse pass over cell centers. Strict '<' keeps the lowest index on
    // residual ties.
    Position3D best{};
    double best_res = std::numeric_limits<double>::infinity();
    for (int iz = 0; iz < n; ++iz) {
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const Position3D c{bounds.lo.x + (ix + 0.5) * dx,
                                   bounds.lo.y + (iy + 0.5) * dy,
                                   bounds.lo.z + (iz + 0.5) * (dz > 0.0 ? dz : 0.0)};
                const double r = rss_fit_residual(c, measurements, params);
                if (r < best_res) {
                    best_res = r;
                    best = c;
                }
            }
        }
    }

    // Pattern search: probe +/- step on each axis, halve the step when no
    // axis improves. Never leaves the bounds, never accepts a worse point.
    double step = std::max({dx, dy, dz}) / 2.0;
    const double tol = options.refine_tolerance_m;
    while (step >= tol / 2.0) {
        bool improved = false;
        for (int axis = 0; axis < 3; ++axis) {
            for (double sign : {+1.0, -1.0}) {
                Position3D probe = best;
                if (axis == 0) probe.x = clampd(probe.x + sign * step, bounds.lo.x, bounds.hi.x);
                if (axis == 1) probe.y = clampd(probe.y + sign * step, bounds.lo.y, bounds.hi.y);
                if (axis == 2) probe.z = clampd(probe.z + sign * step, bounds.lo.z, bounds.hi.z);
                const double r = rss_fit_residual(probe, measurements, params);
                if (r < best_res) {
                    best_res = r;
                    best = probe;
                    improved = true;
                }
            }
        }
        if (!improved) step /= 2.0;
    }

    LocalizationEstimate est;
    est.position = best;
    est.residual_db2 = rss_fit_residual(best, measurements, params, &est.est_tx_power_dbm);
    const double edge = std::max(tol, 1e-9);
    est.bounds_limited = (best.x - bounds.lo.x) < edge || (bounds.hi.x - best.x) < edge ||
                         (best.y - bounds.lo.y) < edge || (bounds.hi.y - best.y) < edge ||
                         (best.z - bounds.lo.z) < edge || (bounds.hi.z - best.z) < edge;
    return est;
}

} // namespace uavsec::detectloc
