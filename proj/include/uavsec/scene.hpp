#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uavsec::scene {

struct Position3D {
    double x = 0.0; // meters
    double y = 0.0;
    double z = 0.0; // height above ground, >= 0

    bool operator==(const Position3D&) const = default;
};

using Vec3 = Position3D;

enum class Role {
    base_station,
    user,
    uav_relay,
    uav_hotzone,
    uav_safezone,
    uav_sensor,
    eavesdropper,
    jammer,
};

const char* role_name(Role r);
std::optional<Role> role_from_name(const std::string& name);

// Whether this role flies. Base stations are ground infrastructure no matter
// how tall the tower is; link classification relies on this.
bool role_is_aerial(Role r);

// Roles that carry a transmit power in downlink scenarios. Users may
// optionally transmit (uplink); eavesdroppers never do.
bool role_transmits(Role r);

enum class MobilityKind { static_, linear, follow };

struct MobilityPolicy {
    MobilityKind kind = MobilityKind::static_;
    Vec3 velocity{};               // linear, m/s
    std::string follow_target;     // follow
    Vec3 follow_offset{};          // follow, meters
};

struct NodeSpec {
    std::string id;
    Role role = Role::user;
    Position3D initial_position{};
    std::optional<double> tx_power_dbm;
    MobilityPolicy mobility{};
};

double distance(const Position3D& a, const Position3D& b);

// Horizontal (xy-plane) separation.
double horizontal_distance(const Position3D& a, const Position3D& b);

// Elevation angle in degrees seen from `ground` toward `aerial`, in (0, 90].
// 90 when directly overhead. Requires aerial.z > ground.z.
double elevation_angle(const Position3D& ground, const Position3D& aerial);

// Azimuth of `to` as seen from `from`, degrees in (-180, 180], atan2 convention.
double azimuth_deg(const Position3D& from, const Position3D& to);

// Position of `node` at time t. Follow chains are resolved through `roster`;
// cycles and missing targets raise config_error. Heights clamp to z >= 0.
Position3D position_at(const NodeSpec& node, std::span<const NodeSpec> roster, double t);

// Load-time validation of mobility references: every follow target exists and
// no follow chain forms a cycle.
void validate_mobility(std::span<const NodeSpec> roster);

} // namespace uavsec::scene
