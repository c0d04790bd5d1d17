#include "uavsec/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace uavsec::rng {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

void Substream::normal_pair(double& z0, double& z1) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
}

Substream link_step_stream(std::uint64_t master_seed, std::uint64_t link_key,
                           std::uint64_t step_index) {
    const std::uint64_t seed = mix64(mix64(master_seed ^ link_key) + step_index);
    return Substream(seed);
}

std::uint64_t link_key(std::string_view tx_id, std::string_view rx_id) {
    std::string joined;
    joined.reserve(tx_id.size() + rx_id.size() + 1);
    joined.append(tx_id);
    joined.push_back('\x1f');
    joined.append(rx_id);
    return fnv1a64(joined);
}

} // namespace uavsec::rng
