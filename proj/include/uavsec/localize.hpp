#pragma once

#include "uavsec/channel.hpp"
#include "uavsec/scene.hpp"

#include <span>
#include <vector>

namespace uavsec::detectloc {

using channel::ChannelParams;
using scene::Position3D;

struct RssMeasurement {
    Position3D sensor;
    double rss_dbm = 0.0;
};

struct SearchBounds {
    Position3D lo;
    Position3D hi;
};

struct LocalizationEstimate {
    Position3D position;
    double est_tx_power_dbm = 0.0;
    double residual_db2 = 0.0;   // sum of squared dB errors at the optimum
    bool bounds_limited = false; // optimum sits on the search box boundary
};

struct LocalizeOptions {
    int coarse_cells_per_axis = 64;
    double refine_tolerance_m = 0.1;
};

// Least-squares source localization from received signal strength.
//
// The forward model is the fading-averaged path loss (LoS-mixture for air
// links), with link classes derived from heights. Transmit power enters
// linearly in dB, so for each candidate position the optimal power is the
// mean of (rss_i + loss_i) and only the position needs searching: a coarse
// grid over the bounds, then an axis-shrinking pattern search down to
// `refine_tolerance_m`. Ties in the grid keep the lowest cell index so the
// result is independent of evaluation order.
LocalizationEstimate rss_localize(std::span<const RssMeasurement> measurements,
                                  const ChannelParams& params, const SearchBounds& bounds,
                                  const LocalizeOptions& options = {});

// Residual of the model fit at a fixed candidate position (optimal power
// substituted). Exposed so exhaustive reference searches share the exact
// objective.
double rss_fit_residual(const Position3D& candidate,
                        std::span<const RssMeasurement> measurements,
                        const ChannelParams& params, double* est_power_dbm = nullptr);

} // namespace uavsec::detectloc
