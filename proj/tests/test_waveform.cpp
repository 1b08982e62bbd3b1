#include "ewave/channel.hpp"
#include "ewave/errors.hpp"
#include "ewave/rng.hpp"
#include "ewave/waveform.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace ewave;
using namespace ewave::waveform;

TEST_CASE("build_frame structure")
{
    const std::uint8_t ff[] = {0xFF};
    const auto f = build_frame(ff, 10'000.0);
    const auto bits = frame_to_bits(f);
    REQUIRE(bits.size() == 32);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(bits[i] == (i % 2 == 0 ? 1 : 0));
    }
    const Bits sync(bits.begin() + 16, bits.begin() + 24);
    CHECK(sync == Bits{1, 1, 0, 1, 0, 0, 1, 1});
    for (std::size_t i = 24; i < 32; ++i) {
        CHECK(bits[i] == 1);
    }
}

TEST_CASE("two-byte key at 20 kHz is a 40-bit, 2 ms frame")
{
    const std::uint8_t key[] = {0x5A, 0xC3};
    const auto f = build_frame(key, 20'000.0);
    CHECK(f.bit_count() == 40);
    CHECK(frame_to_bits(f).size() == 40);
    CHECK(f.duration_s() == doctest::Approx(2.0e-3).epsilon(1e-15));
}

TEST_CASE("frame payload bit order is MSB first")
{
    const std::uint8_t a5[] = {0xA5};
    const auto bits = frame_to_bits(build_frame(a5, 1000.0));
    CHECK(Bits(bits.begin() + 24, bits.end()) == Bits{1, 0, 1, 0, 0, 1, 0, 1});

    const std::uint8_t zero[] = {0x00};
    const auto zbits = frame_to_bits(build_frame(zero, 1000.0));
    CHECK(Bits(zbits.begin() + 24, zbits.end()) == Bits(8, 0));
}

TEST_CASE("frame length is 24 + 8 * payload")
{
    for (std::size_t n = 1; n <= kMaxPayloadBytes; ++n) {
        Bytes p(n, 0x3C);
        CHECK(frame_to_bits(build_frame(p, 20'000.0)).size() == 24 + 8 * n);
    }
}

TEST_CASE("build_frame errors")
{
    const std::uint8_t one[] = {1};
    CHECK_THROWS_AS(build_frame(one, 150'000.0), BitRateTooHigh);
    CHECK_NOTHROW(build_frame(one, 100'000.0));
    CHECK_THROWS_AS(build_frame(one, 0.0), InvalidArgument);
    Bytes big(65, 0);
    CHECK_THROWS_AS(build_frame(big, 1000.0), PayloadTooLarge);
    CHECK_THROWS_AS(build_frame(Bytes{}, 1000.0), EmptyPayload);
}

TEST_CASE("synthesize_envelope, noiseless")
{
    const auto none = channel::NoiseSpec::none();

    SUBCASE("all ones is constant at the high level")
    {
        const Bits ones(12, 1);
        const auto t = synthesize_envelope(ones, -40.0, -50.0, 10'000.0, 160'000, none);
        CHECK(t.samples.size() == 12 * 16);
        for (double s : t.samples) {
            CHECK(s == -40.0);
        }
    }
    SUBCASE("equal levels erase the data")
    {
        const Bits a{1, 0, 1, 1, 0, 0, 1, 0};
        const Bits b{0, 0, 0, 1, 1, 1, 0, 1};
        CHECK(synthesize_envelope(a, -45.0, -45.0, 1000.0, 16'000, none).samples
              == synthesize_envelope(b, -45.0, -45.0, 1000.0, 16'000, none).samples);
    }
    SUBCASE("exactly two values when levels differ")
    {
        const Bits a{1, 0, 1, 1, 0, 0, 1, 0};
        const auto t = synthesize_envelope(a, -30.0, -44.0, 1000.0, 16'000, none);
        CHECK(std::set<double>(t.samples.begin(), t.samples.end()) == std::set<double>{-30.0, -44.0});
    }
    SUBCASE("alternating bits at 100 kbit/s hold each level for 10 us")
    {
        // Wired bench levels: -15 dBm in, 20 dB isolation.
        const double hi = channel::combine_noncoherent({-18.0, -35.0});
        const double lo = channel::combine_noncoherent({-35.0, -35.0});
        Bits alt;
        for (int i = 0; i < 20; ++i) {
            alt.push_back(i % 2 == 0 ? 1 : 0);
        }
        const auto t = synthesize_envelope(alt, hi, lo, 100'000.0, 1'600'000, none);
        CHECK(t.samples.size() == 320);
        CHECK(t.samples[0] == hi);
        CHECK(t.samples[15] == hi);
        CHECK(t.samples[16] == lo);
        CHECK(t.duration_s() == doctest::Approx(200e-6));
    }
}

TEST_CASE("synthesize_envelope preconditions")
{
    const Bits b{1, 0};
    CHECK_THROWS_AS(synthesize_envelope(b, -40, -50, 10'000.0, 70'000, channel::NoiseSpec::none()),
                    UndersampledError);
    CHECK_THROWS_AS(synthesize_envelope(b, -50, -40, 10'000.0, 160'000, channel::NoiseSpec::none()), InvertedLevels);
}

TEST_CASE("sample count follows per-bit rounding")
{
    // 44.1 kHz / 5 kHz = 8.82 -> 9 samples per bit.
    const Bits b(37, 1);
    const auto t = synthesize_envelope(b, -40, -50, 5'000.0, 44'100, channel::NoiseSpec::none());
    CHECK(t.samples.size() == 37 * 9);
    const double ideal = std::ceil(37.0 * 44'100 / 5'000.0);
    CHECK(std::abs(static_cast<double>(t.samples.size()) - ideal) <= 37.0);
}

TEST_CASE("noise is seeded and reproducible")
{
    Rng rng(3);
    Bits bits(64);
    for (auto& b : bits) {
        b = rng.below(2);
    }
    const channel::NoiseSpec n1{-60.0, 1234};
    const channel::NoiseSpec n2{-60.0, 1235};
    const auto a = synthesize_envelope(bits, -40, -50, 20'000.0, 320'000, n1);
    const auto b = synthesize_envelope(bits, -40, -50, 20'000.0, 320'000, n1);
    const auto c = synthesize_envelope(bits, -40, -50, 20'000.0, 320'000, n2);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    for (double s : a.samples) {
        CHECK(std::isfinite(s));
    }
}

TEST_CASE("overwhelming noise is clipped at the power floor")
{
    const Bits bits(32, 0);
    const auto t = synthesize_envelope(bits, -90.0, -90.0, 1000.0, 16'000, {-60.0, 9});
    bool clipped = false;
    for (double s : t.samples) {
        CHECK(std::isfinite(s));
        CHECK(s >= -150.0 - 1e-9);
        clipped = clipped || s == doctest::Approx(-150.0);
    }
    CHECK(clipped);
}

TEST_CASE("mean linear power grows with the share of ones")
{
    const auto none = channel::NoiseSpec::none();
    double prev = -1.0;
    for (int ones = 0; ones <= 16; ++ones) {
        Bits b(16, 0);
        for (int i = 0; i < ones; ++i) {
            b[static_cast<std::size_t>(i)] = 1;
        }
        const auto t = synthesize_envelope(b, -40, -52, 1000.0, 16'000, none);
        double mean = 0.0;
        for (double s : t.samples) {
            mean += channel::dbm_to_mw(s);
        }
        mean /= static_cast<double>(t.samples.size());
        CHECK(mean > prev);
        prev = mean;
    }
}

TEST_CASE("generate_square_cmd")
{
    SUBCASE("1 kHz for 10 ms is ten periods")
    {
        const auto cmd = generate_square_cmd(1000.0, 10e-3, 16'000);
        REQUIRE(cmd.size() == 160);
        int rising = 0;
        for (std::size_t i = 1; i < cmd.size(); ++i) {
            rising += (cmd[i - 1] == 0 && cmd[i] == 1) ? 1 : 0;
        }
        CHECK(cmd[0] == 1);
        CHECK(rising + 1 == 10); // the first period starts high at t = 0
    }
    SUBCASE("10 kHz for 1 ms is ten periods")
    {
        const auto cmd = generate_square_cmd(10'000.0, 1e-3, 160'000);
        REQUIRE(cmd.size() == 160);
        CHECK(cmd[0] == 1);
        CHECK(cmd[7] == 1);
        CHECK(cmd[8] == 0);
        CHECK(cmd[16] == 1);
    }
    SUBCASE("duty cycle over whole periods is one half")
    {
        for (double f : {1000.0, 10'000.0, 100'000.0}) {
            const auto cmd = generate_square_cmd(f, 7.0 / f, static_cast<std::uint64_t>(16 * f));
            std::size_t high = 0;
            for (auto c : cmd) {
                high += c;
            }
            CHECK(2 * high == cmd.size());
        }
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(generate_square_cmd(150'000.0, 1e-3, 10'000'000), BitRateTooHigh);
        CHECK_THROWS_AS(generate_square_cmd(10'000.0, 1e-3, 50'000), UndersampledError);
    }
}
