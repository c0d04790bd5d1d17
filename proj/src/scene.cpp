#include "uavsec/scene.hpp"

#include "uavsec/errors.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace uavsec::scene {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

const NodeSpec* find_node(std::span<const NodeSpec> roster, const std::string& id) {
    for (const auto& n : roster) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

Position3D resolve_position(const NodeSpec& node, std::span<const NodeSpec> roster,
                            double t, int depth) {
    if (depth > static_cast<int>(roster.size()) + 1) {
        throw config_error("follow cycle detected while resolving position of '" + node.id + "'");
    }
    Position3D p = node.initial_position;
    switch (node.mobility.kind) {
    case MobilityKind::static_:
        break;
    case MobilityKind::linear:
        p.x += node.mobility.velocity.x * t;
        p.y += node.mobility.velocity.y * t;
        p.z += node.mobility.velocity.z * t;
        break;
    case MobilityKind::follow: {
        const NodeSpec* target = find_node(roster, node.mobility.follow_target);
        if (target == nullptr) {
            throw config_error("node '" + node.id + "' follows unknown node '" +
                               node.mobility.follow_target + "'");
        }
        Position3D tp = resolve_position(*target, roster, t, depth + 1);
        p.x = tp.x + node.mobility.follow_offset.x;
        p.y = tp.y + node.mobility.follow_offset.y;
        p.z = tp.z + node.mobility.follow_offset.z;
        break;
    }
    }
    if (p.z < 0.0) p.z = 0.0;
    return p;
}

} // namespace

const char* role_name(Role r) {
    switch (r) {
    case Role::base_station: return "base_station";
    case Role::user: return "user";
    case Role::uav_relay: return "uav_relay";
    case Role::uav_hotzone: return "uav_hotzone";
    case Role::uav_safezone: return "uav_safezone";
    case Role::uav_sensor: return "uav_sensor";
    case Role::eavesdropper: return "eavesdropper";
    case Role::jammer: return "jammer";
    }
    return "unknown";
}

std::optional<Role> role_from_name(const std::string& name) {
    static const std::unordered_map<std::string, Role> table = {
        {"base_station", Role::base_station}, {"user", Role::user},
        {"uav_relay", Role::uav_relay},       {"uav_hotzone", Role::uav_hotzone},
        {"uav_safezone", Role::uav_safezone}, {"uav_sensor", Role::uav_sensor},
        {"eavesdropper", Role::eavesdropper}, {"jammer", Role::jammer},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool role_is_aerial(Role r) {
    switch (r) {
    case Role::uav_relay:
    case Role::uav_hotzone:
    case Role::uav_safezone:
    case Role::uav_sensor:
        return true;
    default:
        return false;
    }
}

bool role_transmits(Role r) {
    switch (r) {
    case Role::base_station:
    case Role::uav_relay:
    case Role::uav_hotzone:
    case Role::uav_safezone:
    case Role::jammer:
        return true;
    default:
        return false;
    }
}

double distance(const Position3D& a, const Position3D& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double horizontal_distance(const Position3D& a, const Position3D& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

double elevation_angle(const Position3D& ground, const Position3D& aerial) {
    const double dz = aerial.z - ground.z;
    if (dz <= 0.0) {
        throw std::domain_error("elevation_angle: aerial node must be above ground node");
    }
    const double h = horizontal_distance(ground, aerial);
    if (h == 0.0) return 90.0;
    return std::atan2(dz, h) * kRadToDeg;
}

double azimuth_deg(const Position3D& from, const Position3D& to) {
    return std::atan2(to.y - from.y, to.x - from.x) * kRadToDeg;
}

Position3D position_at(const NodeSpec& node, std::span<const NodeSpec> roster, double t) {
    if (t < 0.0) throw std::domain_error("position_at: t must be >= 0");
    return resolve_position(node, roster, t, 0);
}

void validate_mobility(std::span<const NodeSpec> roster) {
    for (const auto& n : roster) {
        if (n.mobility.kind != MobilityKind::follow) continue;
        // Walk the follow chain; more hops than nodes means a cycle.
        std::unordered_set<std::string> seen{n.id};
        const NodeSpec* cur = &n;
        while (cur->mobility.kind == MobilityKind::follow) {
            const NodeSpec* target = find_node(roster, cur->mobility.follow_target);
            if (target == nullptr) {
                throw config_error("node '" + cur->id + "' follows unknown node '" +
                                   cur->mobility.follow_target + "'");
            }
            if (!seen.insert(target->id).second) {
                throw config_error("follow cycle involving node '" + target->id + "'");
            }
            cur = target;
        }
    }
}

} // namespace uavsec::scene
