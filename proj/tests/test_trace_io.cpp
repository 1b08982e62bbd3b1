#include "ewave/errors.hpp"
#include "ewave/rng.hpp"
#include "ewave/trace_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <limits>
#include <filesystem>

using namespace ewave;
using namespace ewave::waveform;

TEST_CASE("header and sample layout")
{
    EnvelopeTrace t;
    t.sample_rate_hz = 320'000;
    t.meta = "anechoic;ook-v1";
    t.samples = {-41.5, -54.123456789012};
    const std::string text = trace_to_string(t);
    CHECK(text.rfind("sample_rate_hz=320000,unit=dbm,meta=anechoic;ook-v1\n", 0) == 0);
    // at least nine significant digits per sample
    CHECK(text.find("\n-41.5\n") != std::string::npos);
    CHECK(text.find("\n-54.123456789012") != std::string::npos);
}

TEST_CASE("write then read reproduces every sample bit-exactly")
{
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        EnvelopeTrace t;
        t.sample_rate_hz = 1 + rng.below(10'000'000);
        t.meta = "meta, with commas=" + std::to_string(trial);
        t.samples.resize(rng.below(300));
        for (auto& s : t.samples) {
            s = -150.0 + 170.0 * rng.uniform();
        }
        const auto back = trace_from_string(trace_to_string(t));
        CHECK(back.sample_rate_hz == t.sample_rate_hz);
        CHECK(back.meta == t.meta);
        CHECK(back.samples == t.samples);
    }
}

TEST_CASE("file round trip")
{
    EnvelopeTrace t{16'000, {-30.0, -44.000000001, -1e-12}, "x"};
    const auto path = std::filesystem::temp_directory_path() / "ewave_trace_io_test.txt";
    save_trace(path, t);
    const auto back = load_trace(path);
    CHECK(back.samples == t.samples);
    std::filesystem::remove(path);
}

TEST_CASE("malformed input")
{
    CHECK_THROWS_AS(trace_from_string(""), TraceFormatError);
    CHECK_THROWS_AS(trace_from_string("rate=1,unit=dbm,meta=\n"), TraceFormatError);
    CHECK_THROWS_AS(trace_from_string("sample_rate_hz=0,unit=dbm,meta=\n"), TraceFormatError);
    CHECK_THROWS_AS(trace_from_string("sample_rate_hz=10,unit=mw,meta=\n"), TraceFormatError);
    CHECK_THROWS_AS(trace_from_string("sample_rate_hz=10,unit=dbm,meta=\n-40\nabc\n"), TraceFormatError);
    CHECK_THROWS_AS(trace_from_string("sample_rate_hz=10,unit=dbm,meta=\nnan\n"), TraceFormatError);

    EnvelopeTrace bad{10, {1.0}, "two\nlines"};
    CHECK_THROWS_AS(trace_to_string(bad), TraceFormatError);
    EnvelopeTrace inf{10, {std::numeric_limits<double>::infinity()}, ""};
    CHECK_THROWS_AS(trace_to_string(inf), TraceFormatError);
}

TEST_CASE("CRLF line endings are accepted")
{
    const auto t = trace_from_string("sample_rate_hz=8,unit=dbm,meta=m\r\n-40\r\n-50\r\n");
    CHECK(t.meta == "m");
    CHECK(t.samples == std::vector<double>{-40.0, -50.0});
}
