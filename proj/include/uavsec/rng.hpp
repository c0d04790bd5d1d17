#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uavsec::rng {

// 64-bit FNV-1a, used to turn link identifiers into stable stream keys.
std::uint64_t fnv1a64(std::string_view s);

// splitmix64 finalizer; decorrelates structured inputs (seed, key, step).
std::uint64_t mix64(std::uint64_t x);

// One independently seeded random substream. Streams are keyed, not shared:
// every (link, timestep) pair owns its own stream, so draw results never
// depend on roster size, evaluation order, or thread count.
class Substream {
public:
    explicit Substream(std::uint64_t seed) : gen_(seed) {}

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform() {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return 1.0 - u;
    }

    // Standard normal pair via Box-Muller.
    void normal_pair(double& z0, double& z1);

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

// Stream for one (link, step) cell: master seed, link key and step index all
// contribute so streams are disjoint by construction.
Substream link_step_stream(std::uint64_t master_seed, std::uint64_t link_key,
                           std::uint64_t step_index);

// Stable key for a directed link.
std::uint64_t link_key(std::string_view tx_id, std::string_view rx_id);

} // namespace uavsec::rng
