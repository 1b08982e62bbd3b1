#include "ewave/experiment.hpp"
#include "ewave/trace_io.hpp"

#include <doctest.h>

#include <set>

using namespace ewave;
using namespace ewave::experiment;

namespace {

const CheckResult* find_check(const ExperimentResult& r, const std::string& name)
{
    for (const auto& c : r.checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

} // namespace

TEST_CASE("anechoic power sweep keeps the dynamic range within 1.5 dB")
{
    const auto cfg = config::load_config(
        "setup = anechoic\nprotocol.enabled = false\nsweep.param = channel.p_tx_dbm\nsweep.values = -15:24:3\n");
    const auto r = run_experiment(cfg, 2);
    REQUIRE(r.points.size() == 14);
    double lo = 1e9;
    double hi = -1e9;
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& row = r.points[i].row;
        CHECK(row.ok());
        CHECK(row.sweep_param == "channel.p_tx_dbm");
        CHECK(*row.sweep_value == -15.0 + 3.0 * static_cast<double>(i));
        CHECK(row.ber == 0.0);
        REQUIRE(row.dr_db);
        lo = std::min(lo, *row.dr_db);
        hi = std::max(hi, *row.dr_db);
    }
    CHECK(hi - lo <= kPowerSweepDrSpreadDb);
    const auto* c = find_check(r, "dr_spread_power");
    REQUIRE(c);
    CHECK(c->passed);
    CHECK(r.all_passed());
}

TEST_CASE("power sweep with harvest-triggered sessions reports the points that never woke")
{
    // Below about +6 dBm TX the node cannot reach its wake threshold in 60 s.
    const auto cfg =
        config::load_config("setup = anechoic\nsweep.param = channel.p_tx_dbm\nsweep.values = -15,24\n");
    const auto r = run_experiment(cfg, 1);
    CHECK(r.points[0].row.verdict == "rejected_no_signal");
    CHECK_FALSE(r.points[0].row.dr_db);
    CHECK(r.points[1].row.verdict == "accepted");
    CHECK_FALSE(find_check(r, "dr_spread_power")->passed);
    CHECK_FALSE(find_check(r, "sessions_accepted")->passed);
}

TEST_CASE("wired modulation sweep is flat and the ceiling is enforced")
{
    const auto ok = run_experiment(
        config::load_config("setup = wired\nsweep.param = waveform.modulation_hz\nsweep.values = 1000,10000,100000\n"),
        1);
    REQUIRE(ok.points.size() == 3);
    for (const auto& p : ok.points) {
        CHECK(p.row.ok());
        CHECK(*p.row.dr_db == doctest::Approx(14.0754993758468).epsilon(1e-3));
        CHECK(p.row.verdict == "n/a");
    }
    REQUIRE(find_check(ok, "dr_spread_modulation"));
    CHECK(find_check(ok, "dr_spread_modulation")->passed);

    const auto over = run_experiment(
        config::load_config("setup = wired\nsweep.param = waveform.modulation_hz\nsweep.values = 100000,150000\n"),
        1);
    CHECK(over.points[0].row.ok());
    CHECK(over.points[1].row.status.find("BitRateTooHigh") != std::string::npos);
    CHECK_FALSE(find_check(over, "points_ok")->passed);
    CHECK_FALSE(over.all_passed());
}

TEST_CASE("csv layout")
{
    const auto r = run_experiment(config::load_config("setup = anechoic\n"), 1);
    const std::string csv = to_csv(r);
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    const std::string row = csv.substr(csv.find('\n') + 1);
    CHECK(row.rfind("none,,13.", 0) == 0);
    CHECK(row.find(",accepted,0,") != std::string::npos);
    CHECK(row.substr(row.size() - 6) == ",ok,1\n");

    CsvRow blank;
    CHECK(format_row(blank) == "none,,,,n/a,,,ok,0");
}

TEST_CASE("wired trace: 100 kHz square wave holds each level for 10 us")
{
    auto cfg = config::load_config("setup = wired\nchannel.noise_dbm = none\n");
    const auto t = emit_trace(cfg);
    CHECK(t.sample_rate_hz == 1'600'000);
    CHECK(t.samples.size() == 20 * 16);
    const std::set<double> levels(t.samples.begin(), t.samples.end());
    CHECK(levels.size() == 2);
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        CHECK(t.samples[i] == (((i / 8) % 2 == 0) ? *levels.rbegin() : *levels.begin()));
    }
    // (-18 dBm + -35 dBm) over (-35 dBm + -35 dBm), no noise term
    CHECK(*levels.rbegin() - *levels.begin() == doctest::Approx(14.0755000356605).epsilon(1e-10));
    CHECK(t.meta == "wired;ook-v1");
}

TEST_CASE("same config and seed give identical outputs; another seed does not")
{
    const auto cfg = config::load_config("setup = anechoic\nprotocol.attacker = replay\n");
    const auto a = run_experiment(cfg, 1);
    const auto b = run_experiment(cfg, 1);
    CHECK(to_csv(a) == to_csv(b));
    CHECK(waveform::trace_to_string(emit_trace(cfg)) == waveform::trace_to_string(emit_trace(cfg)));
    CHECK(find_check(a, "replay_rejected")->passed);

    const auto other = config::with_seed(cfg, 2);
    CHECK(waveform::trace_to_string(emit_trace(other)) != waveform::trace_to_string(emit_trace(cfg)));
}

TEST_CASE("thread count does not change results")
{
    const auto cfg = config::load_config("setup = anechoic\nsweep.param = channel.d_ul_m\nsweep.values = 1:6:0.5\n");
    CHECK(to_csv(run_experiment(cfg, 1)) == to_csv(run_experiment(cfg, 4)));
}

TEST_CASE("summary json")
{
    const auto r = run_experiment(config::load_config("setup = wired\n"), 1);
    const std::string j = summary_json(r);
    CHECK(j.find("\"setup\": \"wired\"") != std::string::npos);
    CHECK(j.find("\"passed\": true") != std::string::npos);
}
