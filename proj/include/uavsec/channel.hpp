#pragma once

#include "uavsec/rng.hpp"
#include "uavsec/scene.hpp"

namespace uavsec::channel {

using scene::Position3D;

// Large-scale and small-scale channel parameters. Ground links follow a
// log-distance law anchored at free space; links with an airborne endpoint
// use free-space loss plus an elevation-dependent LoS/NLoS excess.
struct ChannelParams {
    double carrier_frequency_hz = 2.0e9;
    double ground_pathloss_exponent = 3.5;
    double reference_distance_m = 1.0;
    double a2g_a = 9.61;     // LoS-probability curve parameters (urban)
    double a2g_b = 0.16;
    double eta_los_db = 1.0; // excess loss on top of free space
    double eta_nlos_db = 20.0;
    double rician_k_db = 10.0;        // LoS small-scale fading K factor
    int fading_samples_per_step = 1000;
    double aerial_z_threshold_m = 10.0; // height rule for role-less positions
};

void validate(const ChannelParams& p);

enum class LinkClass { ground_ground, air_ground, air_air };

const char* link_class_name(LinkClass c);

// Height-threshold classification, for callers that only have coordinates
// (e.g. fitting a source from RSS samples).
LinkClass classify_by_height(const Position3D& a, const Position3D& b,
                             const ChannelParams& params);

struct FadingDraw {
    double amplitude = 1.0; // linear voltage gain, E[a^2] = 1
};

// Free-space path loss in dB: 20log10(d) + 20log10(f) - 147.55.
double fspl_db(double distance_m, double frequency_hz);

// Large-scale loss for one realized LoS state. Distances below the reference
// distance are treated as the reference distance; coincident endpoints are a
// domain error. `los_realized` is ignored for ground links.
double path_loss_db(const Position3D& tx, const Position3D& rx, LinkClass cls,
                    const ChannelParams& params, bool los_realized);

// Probability that an air link at elevation angle theta is line-of-sight:
// 1 / (1 + a*exp(-b*(theta - a))). Valid for theta in (0, 90].
double los_probability(double theta_deg, const ChannelParams& params);

// Elevation angle used for the LoS curve of a link between two positions.
// Symmetric in its endpoints (|dz| over horizontal distance), 90 deg when
// stacked vertically, floored slightly above zero for same-height pairs.
double link_elevation_deg(const Position3D& a, const Position3D& b);

// One small-scale amplitude draw: Rician for air LoS branches, Rayleigh
// otherwise. Unit mean-square power in both families.
FadingDraw draw_fading(LinkClass cls, bool los_realized, const ChannelParams& params,
                       rng::Substream& stream);

// One realized linear power gain: LoS state (air links) is a Bernoulli draw
// on the elevation-dependent probability, then path loss and fading compose.
double link_gain_linear(const Position3D& tx, const Position3D& rx, LinkClass cls,
                        const ChannelParams& params, rng::Substream& stream);

// Per-link sampling with the geometry-dependent terms hoisted out of the draw
// loop. sample() consumes the stream exactly like link_gain_linear.
class LinkGainSampler {
public:
    static LinkGainSampler make(const Position3D& tx, const Position3D& rx, LinkClass cls,
                                const ChannelParams& params);

    double sample(rng::Substream& stream) const;
    double mean_gain() const { return mean_gain_; }
    double deterministic_gain() const { return det_gain_; } // fading-disabled mode

private:
    LinkClass cls_ = LinkClass::ground_ground;
    double p_los_ = 0.0;
    double gain_los_ = 0.0;  // ground links keep theirs in gain_nlos_
    double gain_nlos_ = 0.0;
    double rician_nu_ = 0.0;
    double rician_sigma_ = 0.0;
    double mean_gain_ = 0.0;
    double det_gain_ = 0.0;
};

// Fading-averaged loss: the LoS/NLoS mixture for air links, the plain
// log-distance loss for ground links. Forward model for RSS fitting.
double mean_path_loss_db(const Position3D& tx, const Position3D& rx, LinkClass cls,
                         const ChannelParams& params);

// Deterministic loss for fading-disabled runs: amplitude pinned to 1 and the
// LoS state forced to wherever the mixture majority lies (p_los >= 1/2).
double deterministic_path_loss_db(const Position3D& tx, const Position3D& rx,
                                  LinkClass cls, const ChannelParams& params);

} // namespace uavsec::channel
