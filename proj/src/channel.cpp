#include "uavsec/channel.hpp"

#include "uavsec/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uavsec::channel {

namespace {

constexpr double kFsplConstDb = 147.55;
constexpr double kMinElevationDeg = 0.01;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Loss laws saturate at the reference distance; closer passes (a user walking
// through a jammer's position) are treated as reference-distance passes.
double loss_at_distance_db(double d, LinkClass cls, const ChannelParams& params,
                           bool los_realized) {
    if (d < params.reference_distance_m) d = params.reference_distance_m;
    if (cls == LinkClass::ground_ground) {
        const double d0 = params.reference_distance_m;
        return fspl_db(d0, params.carrier_frequency_hz) +
               10.0 * params.ground_pathloss_exponent * std::log10(d / d0);
    }
    const double eta = los_realized ? params.eta_los_db : params.eta_nlos_db;
    return fspl_db(d, params.carrier_frequency_hz) + eta;
}

} // namespace

void validate(const ChannelParams& p) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw config_error(std::string("channel parameter '") + name + "' must be positive");
        }
    };
    positive(p.carrier_frequency_hz, "carrier_frequency_hz");
    positive(p.reference_distance_m, "reference_distance_m");
    positive(p.a2g_a, "a2g_a");
    positive(p.a2g_b, "a2g_b");
    positive(p.eta_los_db, "eta_los_db");
    positive(p.eta_nlos_db, "eta_nlos_db");
    positive(p.rician_k_db, "rician_k_db");
    positive(p.aerial_z_threshold_m, "aerial_z_threshold_m");
    if (p.ground_pathloss_exponent < 2.0 || p.ground_pathloss_exponent > 6.0) {
        throw config_error("channel parameter 'ground_pathloss_exponent' must be in [2, 6]");
    }
    if (p.fading_samples_per_step < 1) {
        throw config_error("channel parameter 'fading_samples_per_step' must be >= 1");
    }
}

const char* link_class_name(LinkClass c) {
    switch (c) {
    case LinkClass::ground_ground: return "ground_ground";
    case LinkClass::air_ground: return "air_ground";
    case LinkClass::air_air: return "air_air";
    }
    return "unknown";
}

LinkClass classify_by_height(const Position3D& a, const Position3D& b,
                             const ChannelParams& params) {
    const bool a_air = a.z >= params.aerial_z_threshold_m;
    const bool b_air = b.z >= params.aerial_z_threshold_m;
    if (a_air && b_air) return LinkClass::air_air;
    if (a_air || b_air) return LinkClass::air_ground;
    return LinkClass::ground_ground;
}

double fspl_db(double distance_m, double frequency_hz) {
    return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) - kFsplConstDb;
}

double path_loss_db(const Position3D& tx, const Position3D& rx, LinkClass cls,
                    const ChannelParams& params, bool los_realized) {
    const double d = scene::distance(tx, rx);
    if (d == 0.0) {
        throw std::domain_error("path_loss_db: coincident endpoints");
    }
    return loss_at_distance_db(d, cls, params, los_realized);
}

double los_probability(double theta_deg, const ChannelParams& params) {
    if (!(theta_deg > 0.0) || theta_deg > 90.0) {
        throw std::domain_error("los_probability: theta must be in (0, 90]");
    }
    return 1.0 / (1.0 + params.a2g_a * std::exp(-params.a2g_b * (theta_deg - params.a2g_a)));
}

double link_elevation_deg(const Position3D& a, const Position3D& b) {
    const double dz = std::abs(a.z - b.z);
    const double h = scene::horizontal_distance(a, b);
    if (h == 0.0) return 90.0;
    const double theta = std::atan2(dz, h) * (180.0 / std::numbers::pi);
    return theta < kMinElevationDeg ? kMinElevationDeg : theta;
}

FadingDraw draw_fading(LinkClass cls, bool los_realized, const ChannelParams& params,
                       rng::Substream& stream) {
    if (cls != LinkClass::ground_ground && los_realized) {
        // Rician with E[a^2] = 1: deterministic component nu, scatter sigma.
        const double k = db_to_linear(params.rician_k_db);
        const double nu = std::sqrt(k / (k + 1.0));
        const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
        double z0 = 0.0, z1 = 0.0;
        stream.normal_pair(z0, z1);
        const double re = nu + sigma * z0;
        const double im = sigma * z1;
        return FadingDraw{std::sqrt(re * re + im * im)};
    }
    // Rayleigh with E[a^2] = 1: a^2 ~ Exp(1).
    return FadingDraw{std::sqrt(-std::log(stream.uniform()))};
}

double link_gain_linear(const Position3D& tx, const Position3D& rx, LinkClass cls,
                        const ChannelParams& params, rng::Substream& stream) {
    return LinkGainSampler::make(tx, rx, cls, params).sample(stream);
}

LinkGainSampler LinkGainSampler::make(const Position3D& tx, const Position3D& rx, LinkClass cls,
                                      const ChannelParams& params) {
    LinkGainSampler s;
    s.cls_ = cls;
    const double d = scene::distance(tx, rx);
    if (cls == LinkClass::ground_ground) {
        s.gain_nlos_ = db_to_linear(-loss_at_distance_db(d, cls, params, false));
        s.mean_gain_ = s.gain_nlos_;
        s.det_gain_ = s.gain_nlos_;
        return s;
    }
    s.p_los_ = los_probability(link_elevation_deg(tx, rx), params);
    s.gain_los_ = db_to_linear(-loss_at_distance_db(d, cls, params, true));
    s.gain_nlos_ = db_to_linear(-loss_at_distance_db(d, cls, params, false));
    const double k = db_to_linear(params.rician_k_db);
    s.rician_nu_ = std::sqrt(k / (k + 1.0));
    s.rician_sigma_ = std::sqrt(1.0 / (2.0 * (k + 1.0)));
    s.mean_gain_ = s.p_los_ * s.gain_los_ + (1.0 - s.p_los_) * s.gain_nlos_;
    s.det_gain_ = s.p_los_ >= 0.5 ? s.gain_los_ : s.gain_nlos_;
    return s;
}

double LinkGainSampler::sample(rng::Substream& stream) const {
    if (cls_ == LinkClass::ground_ground) {
        return gain_nlos_ * -std::log(stream.uniform());
    }
    const bool los = stream.uniform() <= p_los_;
    if (los) {
        double z0 = 0.0, z1 = 0.0;
        stream.normal_pair(z0, z1);
        const double re = rician_nu_ + rician_sigma_ * z0;
        const double im = rician_sigma_ * z1;
        return gain_los_ * (re * re + im * im);
    }
    return gain_nlos_ * -std::log(stream.uniform());
}

double mean_path_loss_db(const Position3D& tx, const Position3D& rx, LinkClass cls,
                         const ChannelParams& params) {
    const double d = scene::distance(tx, rx);
    if (cls == LinkClass::ground_ground) {
        return loss_at_distance_db(d, cls, params, false);
    }
    const double p = los_probability(link_elevation_deg(tx, rx), params);
    const double g_los = db_to_linear(-loss_at_distance_db(d, cls, params, true));
    const double g_nlos = db_to_linear(-loss_at_distance_db(d, cls, params, false));
    return -10.0 * std::log10(p * g_los + (1.0 - p) * g_nlos);
}

double deterministic_path_loss_db(const Position3D& tx, const Position3D& rx,
                                  LinkClass cls, const ChannelParams& params) {
    const double d = scene::distance(tx, rx);
    if (cls == LinkClass::ground_ground) {
        return loss_at_distance_db(d, cls, params, false);
    }
    const bool los = los_probability(link_elevation_deg(tx, rx), params) >= 0.5;
    return loss_at_distance_db(d, cls, params, los);
}

} // namespace uavsec::channel
