#include "uavsec/channel.hpp"
#include "uavsec/errors.hpp"
#include "uavsec/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace uavsec;
using channel::ChannelParams;
using channel::LinkClass;
using scene::Position3D;

TEST_CASE("free-space loss reference values") {
    // 20log10(d) + 20log10(2e9) - 147.55
    CHECK(channel::fspl_db(1.0, 2.0e9) == doctest::Approx(38.4706).epsilon(1e-5));
    CHECK(channel::fspl_db(1000.0, 2.0e9) == doctest::Approx(98.4706).epsilon(1e-5));
}

TEST_CASE("ground loss at the reference distance equals free space, any exponent") {
    ChannelParams p;
    const Position3D tx{0, 0, 0}, rx{1, 0, 0};
    for (double n : {2.0, 3.5, 5.0}) {
        p.ground_pathloss_exponent = n;
        CHECK(channel::path_loss_db(tx, rx, LinkClass::ground_ground, p, false) ==
              doctest::Approx(channel::fspl_db(1.0, p.carrier_frequency_hz)));
    }
}

TEST_CASE("path loss grows with distance for every class and LoS state") {
    ChannelParams p;
    double prev_g = -1e9, prev_al = -1e9, prev_an = -1e9;
    for (double d = 2.0; d < 3000.0; d *= 1.7) {
        const Position3D tx{0, 0, 0}, rx{d, 0, 25};
        const double g = channel::path_loss_db(tx, rx, LinkClass::ground_ground, p, false);
        const double al = channel::path_loss_db(tx, rx, LinkClass::air_ground, p, true);
        const double an = channel::path_loss_db(tx, rx, LinkClass::air_ground, p, false);
        CHECK(g > prev_g);
        CHECK(al > prev_al);
        CHECK(an > prev_an);
        prev_g = g;
        prev_al = al;
        prev_an = an;
    }
}

TEST_CASE("coincident endpoints are a domain error") {
    ChannelParams p;
    CHECK_THROWS_AS(
        channel::path_loss_db({5, 5, 5}, {5, 5, 5}, LinkClass::ground_ground, p, false),
        std::domain_error);
}

TEST_CASE("LoS probability curve") {
    ChannelParams p;
    CHECK(channel::los_probability(90.0, p) == doctest::Approx(0.999975).epsilon(1e-5));
    // at theta == a the exponential collapses to 1
    CHECK(channel::los_probability(p.a2g_a, p) == doctest::Approx(1.0 / 10.61).epsilon(1e-9));
    CHECK_THROWS_AS(channel::los_probability(0.0, p), std::domain_error);
    CHECK_THROWS_AS(channel::los_probability(90.5, p), std::domain_error);

    double prev = 0.0;
    for (double theta = 1.0; theta <= 90.0; theta += 1.0) {
        const double v = channel::los_probability(theta, p);
        CHECK(v > prev);
        CHECK(v > 0.0);
        CHECK(v < 1.0 + 1e-12);
        prev = v;
    }
}

TEST_CASE("height-threshold classification") {
    ChannelParams p;
    CHECK(channel::classify_by_height({0, 0, 0}, {1, 0, 1.5}, p) == LinkClass::ground_ground);
    CHECK(channel::classify_by_height({0, 0, 0}, {1, 0, 20}, p) == LinkClass::air_ground);
    CHECK(channel::classify_by_height({0, 0, 15}, {1, 0, 20}, p) == LinkClass::air_air);
}

TEST_CASE("fading families are unit power") {
    ChannelParams p;
    rng::Substream s(12345);
    const int n = 1'000'000;

    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = channel::draw_fading(LinkClass::ground_ground, false, p, s).amplitude;
        sum_sq += a * a;
    }
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.01));

    sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = channel::draw_fading(LinkClass::air_ground, true, p, s).amplitude;
        sum_sq += a * a;
    }
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("fixed seed reproduces the draw sequence") {
    ChannelParams p;
    rng::Substream s1(99), s2(99);
    for (int i = 0; i < 100; ++i) {
        const double a = channel::draw_fading(LinkClass::air_ground, i % 2 == 0, p, s1).amplitude;
        const double b = channel::draw_fading(LinkClass::air_ground, i % 2 == 0, p, s2).amplitude;
        CHECK(a == b);
    }
}

TEST_CASE("gain with unit amplitude is the dB-to-linear identity") {
    // 100 dB of loss and amplitude forced to 1 leave exactly 1e-10: the
    // deterministic gain of a ground link whose loss is pinned to 100 dB.
    ChannelParams p;
    p.ground_pathloss_exponent = 2.0;
    // pick d so that fspl(d0) + 20log10(d/d0) == 100 dB at 2 GHz
    const double d = std::pow(10.0, (100.0 - channel::fspl_db(1.0, p.carrier_frequency_hz)) / 20.0);
    const auto sampler = channel::LinkGainSampler::make(
        {0, 0, 0}, {d, 0, 0}, LinkClass::ground_ground, p);
    CHECK(sampler.deterministic_gain() == doctest::Approx(1e-10).epsilon(1e-9));
}

TEST_CASE("Monte-Carlo mean gain matches the analytic LoS mixture") {
    ChannelParams p;
    const Position3D tx{0, 0, 0}, rx{120, 0, 40};
    const auto cls = LinkClass::air_ground;
    const double analytic =
        std::pow(10.0, -channel::mean_path_loss_db(tx, rx, cls, p) / 10.0);
    auto s = rng::link_step_stream(7, rng::link_key("a", "b"), 0);
    const int n = 100'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += channel::link_gain_linear(tx, rx, cls, p, s);
    CHECK(sum / n == doctest::Approx(analytic).epsilon(0.02));
}

TEST_CASE("doubling ground distance scales gain by 2^-n") {
    ChannelParams p; // n = 3.5 -> gain ratio 0.0884
    const Position3D tx{0, 0, 0}, near{200, 0, 0}, far{400, 0, 0};
    auto s1 = rng::link_step_stream(21, rng::link_key("t", "near"), 0);
    auto s2 = rng::link_step_stream(21, rng::link_key("t", "far"), 0);
    const int n = 200'000;
    double g_near = 0.0, g_far = 0.0;
    for (int i = 0; i < n; ++i) {
        g_near += channel::link_gain_linear(tx, near, LinkClass::ground_ground, p, s1);
        g_far += channel::link_gain_linear(tx, far, LinkClass::ground_ground, p, s2);
    }
    CHECK(g_far / g_near == doctest::Approx(std::pow(2.0, -3.5)).epsilon(0.02));
}

TEST_CASE("link gains stay nonnegative and finite") {
    ChannelParams p;
    auto s = rng::link_step_stream(3, rng::link_key("x", "y"), 5);
    for (int i = 0; i < 10'000; ++i) {
        const double g =
            channel::link_gain_linear({0, 0, 0}, {50, 20, 35}, LinkClass::air_ground, p, s);
        CHECK(g >= 0.0);
        CHECK(std::isfinite(g));
    }
}

TEST_CASE("sampler fast path matches the one-shot gain draw") {
    ChannelParams p;
    const Position3D tx{0, 0, 30}, rx{340, 10, 20};
    const auto sampler = channel::LinkGainSampler::make(tx, rx, LinkClass::air_ground, p);
    auto s1 = rng::link_step_stream(42, 1, 2);
    auto s2 = rng::link_step_stream(42, 1, 2);
    for (int i = 0; i < 1000; ++i) {
        CHECK(sampler.sample(s1) ==
              channel::link_gain_linear(tx, rx, LinkClass::air_ground, p, s2));
    }
}

TEST_CASE("substreams are keyed, not sequential") {
    auto a0 = rng::link_step_stream(9, rng::link_key("bs1", "ue1"), 4);
    auto a1 = rng::link_step_stream(9, rng::link_key("bs1", "ue1"), 4);
    CHECK(a0.raw() == a1.raw());
    auto b = rng::link_step_stream(9, rng::link_key("bs1", "ue2"), 4);
    auto c = rng::link_step_stream(9, rng::link_key("bs1", "ue1"), 5);
    auto fresh = rng::link_step_stream(9, rng::link_key("bs1", "ue1"), 4);
    const auto r = fresh.raw();
    CHECK(r != b.raw());
    CHECK(r != c.raw());
}
