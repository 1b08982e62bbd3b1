#include "ewave/channel.hpp"
#include "ewave/errors.hpp"
#include "ewave/rng.hpp"
#include "ewave/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace ewave;
using namespace ewave::channel;

namespace {

// Friis in linear units, written from P_r = P_t G_t G_r (lambda / 4 pi d)^2.
double friis_oracle_dbm(double p_tx_dbm, double g_tx_dbi, double g_rx_dbi, double d, double f)
{
    const double p_tx_w = std::pow(10.0, p_tx_dbm / 10.0) / 1000.0;
    const double g_tx = std::pow(10.0, g_tx_dbi / 10.0);
    const double g_rx = std::pow(10.0, g_rx_dbi / 10.0);
    const double lambda = 299792458.0 / f;
    const double ratio = lambda / (4.0 * std::numbers::pi * d);
    const double p_rx_w = p_tx_w * g_tx * g_rx * ratio * ratio;
    return 10.0 * std::log10(p_rx_w * 1000.0);
}

} // namespace

TEST_CASE("friis matches the hand-computed anechoic link")
{
    // 15 + 2.5 + 9.2 - 41.8477560662583 (FSPL at 3.4 m, 868 MHz)
    const double p = friis_received_power(15.0, {2.5}, {9.2}, {3.4, 868e6});
    CHECK(p == doctest::Approx(-15.1477560662583).epsilon(1e-12));
    CHECK(p == doctest::Approx(friis_oracle_dbm(15.0, 2.5, 9.2, 3.4, 868e6)).epsilon(1e-12));
}

TEST_CASE("friis: ten times the distance costs exactly 20 dB")
{
    const double near = friis_received_power(0.0, {3.0}, {3.0}, {5.0, 915e6});
    const double far = friis_received_power(0.0, {3.0}, {3.0}, {50.0, 915e6});
    CHECK(near - far == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("friis with unity gains and 0 dBm equals minus the path loss")
{
    const LinkGeometry g{7.0, 2.4e9};
    CHECK(friis_received_power(0.0, {0.0}, {0.0}, g) == -free_space_path_loss_db(g));
}

TEST_CASE("friis rejects near-field and non-positive geometry")
{
    const double lambda = kSpeedOfLight / 868e6;
    CHECK_THROWS_AS(friis_received_power(0.0, {}, {}, {0.5 * lambda, 868e6}), NearFieldError);
    CHECK_NOTHROW(friis_received_power(0.0, {}, {}, {lambda, 868e6}));
    CHECK_THROWS_AS(friis_received_power(0.0, {}, {}, {-1.0, 868e6}), InvalidArgument);
    CHECK_THROWS_AS(friis_received_power(0.0, {}, {}, {1.0, 0.0}), InvalidArgument);
}

TEST_CASE("friis is monotone in distance and gains")
{
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double f = 1e8 + rng.uniform() * 5e9;
        const double d = kSpeedOfLight / f * (1.0 + rng.uniform() * 100.0);
        const double g1 = -5.0 + 20.0 * rng.uniform();
        const double g2 = -5.0 + 20.0 * rng.uniform();
        const double base = friis_received_power(0.0, {g1}, {g2}, {d, f});
        CHECK(friis_received_power(0.0, {g1}, {g2}, {d * 1.01, f}) < base);
        CHECK(friis_received_power(0.0, {g1 + 0.1}, {g2}, {d, f}) > base);
        CHECK(friis_received_power(0.0, {g1}, {g2 + 0.1}, {d, f}) > base);
    }
}

TEST_CASE("antenna gain range is a warning predicate, not an error")
{
    CHECK(AntennaSpec{9.2}.gain_in_typical_range());
    CHECK_FALSE(AntennaSpec{45.0}.gain_in_typical_range());
    CHECK_NOTHROW(friis_received_power(0.0, {45.0}, {0.0}, {10.0, 868e6}));
}

TEST_CASE("backscatter: degenerate modulation gives identical states")
{
    auto rect = RectifierModel::default_model();
    rect.gamma_high_db = rect.gamma_low_db;
    const LinkGeometry g{3.4, 868e6};
    CHECK(backscatter_received_power(15, {2.5}, {9.2}, {9.2}, g, g, rect, true)
          == backscatter_received_power(15, {2.5}, {9.2}, {9.2}, g, g, rect, false));
}

TEST_CASE("backscatter: swapping source and monitor is reciprocal")
{
    const auto rect = RectifierModel::default_model();
    const LinkGeometry dl{3.0, 868e6};
    const LinkGeometry ul{5.5, 868e6};
    const double a = backscatter_received_power(10, {2.5}, {9.2}, {6.0}, dl, ul, rect, true);
    const double b = backscatter_received_power(10, {6.0}, {9.2}, {2.5}, ul, dl, rect, true);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("backscatter: state difference is the reflection contrast on the anechoic bench")
{
    const auto s = LinkScenario::anechoic();
    const double hi = monitor_backscatter_power(s, true);
    const double lo = monitor_backscatter_power(s, false);
    CHECK(hi - lo == doctest::Approx(17.0).epsilon(1e-12));
    // -15.1477560662583 - 3 + (9.2 + 9.2 - 41.8477560662583)
    CHECK(hi == doctest::Approx(-41.5955121325166).epsilon(1e-12));
}

TEST_CASE("backscatter: near-field uplink is reported")
{
    const auto rect = RectifierModel::default_model();
    CHECK_THROWS_AS(backscatter_received_power(0, {}, {}, {}, {3.4, 868e6}, {0.01, 868e6}, rect, true),
                    NearFieldError);
}

TEST_CASE("leakage models")
{
    CHECK(leakage_power(15.0, LeakageModel::coupling(-57.0, 15.0)) == -57.0);
    CHECK(leakage_power(-15.0, LeakageModel::circulator(20.0)) == -35.0);
    CHECK(leakage_power(24.0, LeakageModel::coupling(-57.0, 15.0)) == -48.0);
    CHECK_THROWS_AS(LeakageModel::circulator(-1.0), InvalidArgument);
}

TEST_CASE("combine_noncoherent")
{
    CHECK(combine_noncoherent({-30.0, -30.0}) == doctest::Approx(-26.98970004336019).epsilon(1e-12));
    CHECK(combine_noncoherent({-20.0, -120.0}) == doctest::Approx(-20.0).epsilon(1e-4 / 20.0));
    // 10 log10(10^-5.7 + 10^-4 + 10^-9), summed by hand
    CHECK(combine_noncoherent({-57.0, -40.0, -90.0}) == doctest::Approx(-39.91415742804025).epsilon(1e-12));
    CHECK_THROWS_AS(combine_noncoherent(std::vector<double>{}), EmptyInput);
}

TEST_CASE("combine_noncoherent is permutation invariant and dominates its inputs")
{
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(1 + rng.below(8));
        for (auto& x : p) {
            x = -120.0 + 100.0 * rng.uniform();
        }
        const double ref = combine_noncoherent(p);
        CHECK(ref >= *std::max_element(p.begin(), p.end()));
        std::vector<double> q = p;
        std::reverse(q.begin(), q.end());
        std::rotate(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(q.size() / 2), q.end());
        CHECK(combine_noncoherent(q) == ref);
    }
}

TEST_CASE("dynamic range")
{
    CHECK(dynamic_range_db(-40.0, -40.0) == 0.0);
    CHECK(dynamic_range_db(-40.0, -53.0) == 13.0);
}

TEST_CASE("anechoic baseline dynamic range")
{
    // Oracle chain: backscatter -41.5955 / -58.5955 dBm, leakage -57, noise
    // -100, power-summed per state.
    const auto m = monitor_levels(LinkScenario::anechoic());
    CHECK(m.leakage_dbm == -57.0);
    CHECK(m.dynamic_range_db() > 0.0);
    CHECK(m.dynamic_range_db() == doctest::Approx(13.2423138922633).epsilon(1e-10));
}

TEST_CASE("dynamic range shrinks as the leakage floor rises")
{
    auto s = LinkScenario::anechoic();
    double prev = INFINITY;
    for (double floor = -100.0; floor <= -20.0; floor += 2.0) {
        s.leakage = LeakageModel::coupling(floor, 15.0);
        const double dr = monitor_levels(s).dynamic_range_db();
        CHECK(dr <= prev);
        prev = dr;
    }
}

TEST_CASE("harvested_dc")
{
    RectifierModel r = RectifierModel::default_model();

    SUBCASE("zero efficiency harvests nothing")
    {
        r.efficiency_curve = {{-30.0, 0.0}, {30.0, 0.0}};
        const auto h = harvested_dc(0.0, r);
        CHECK(h.p_dc_watts == 0.0);
        CHECK(h.v_out_volts == 0.0);
    }
    SUBCASE("-10 dBm at 20 % into 10 kOhm")
    {
        const auto h = harvested_dc(-10.0, r);
        CHECK(h.p_dc_watts == doctest::Approx(20e-6).epsilon(1e-12));
        CHECK(h.v_out_volts == doctest::Approx(0.447213595499958).epsilon(1e-12));
    }
    SUBCASE("endpoint clamping")
    {
        CHECK(interpolate_efficiency(r.efficiency_curve, -40.0) == 0.05);
        CHECK(interpolate_efficiency(r.efficiency_curve, 35.0) == 0.55);
        CHECK(interpolate_efficiency(r.efficiency_curve, -15.0) == doctest::Approx(0.125));
    }
    SUBCASE("empty curve")
    {
        r.efficiency_curve.clear();
        CHECK_THROWS_AS(harvested_dc(0.0, r), EmptyCurve);
    }
}

TEST_CASE("harvested DC never exceeds the RF input")
{
    const auto r = RectifierModel::default_model();
    for (double p = -40.0; p <= 30.0; p += 0.5) {
        const double p_in_w = std::pow(10.0, (p - 30.0) / 10.0);
        CHECK(harvested_dc(p, r).p_dc_watts <= p_in_w);
    }
}

TEST_CASE("rectifier invariants")
{
    auto r = RectifierModel::default_model();
    CHECK(r.violations().empty());
    r.gamma_high_db = -25.0;
    CHECK_FALSE(r.violations().empty());
    r = RectifierModel::default_model();
    r.gamma_high_db = 1.0;
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
    r = RectifierModel::default_model();
    r.efficiency_curve = {{0.0, 0.1}, {0.0, 0.2}};
    CHECK_FALSE(r.violations().empty());
    r.efficiency_curve = {{0.0, 1.2}};
    CHECK_FALSE(r.violations().empty());
    r = RectifierModel::default_model();
    r.load_ohms = 0.0;
    CHECK_FALSE(r.violations().empty());
}
