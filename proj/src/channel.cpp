#include "ewave/channel.hpp"

#include "ewave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ewave::channel {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

bool AntennaSpec::gain_in_typical_range() const { return gain_dbi >= -10.0 && gain_dbi <= 30.0; }

double LinkGeometry::wavelength_m() const { return kSpeedOfLight / frequency_hz; }

void LinkGeometry::check_far_field() const
{
    if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
        throw InvalidArgument("link distance must be a positive finite number of meters");
    }
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
        throw InvalidArgument("carrier frequency must be a positive finite number of hertz");
    }
    if (distance_m < wavelength_m()) {
        throw NearFieldError("distance " + std::to_string(distance_m) + " m is inside one wavelength ("
                             + std::to_string(wavelength_m()) + " m); free-space model does not apply");
    }
}

RectifierModel RectifierModel::default_model()
{
    RectifierModel m;
    m.efficiency_curve = {{-20.0, 0.05}, {-10.0, 0.20}, {0.0, 0.40}, {10.0, 0.50}, {20.0, 0.55}};
    return m;
}

std::vector<std::string> RectifierModel::violations() const
{
    std::vector<std::string> out;
    if (!(gamma_low_db <= 0.0)) {
        out.emplace_back("gamma_low_db must be <= 0 dB (passive reflection)");
    }
    if (!(gamma_high_db <= 0.0)) {
        out.emplace_back("gamma_high_db must be <= 0 dB (passive reflection)");
    }
    if (!(gamma_high_db > gamma_low_db)) {
        out.emplace_back("gamma_high_db must exceed gamma_low_db");
    }
    if (efficiency_curve.empty()) {
        out.emplace_back("efficiency_curve must not be empty");
    }
    for (std::size_t i = 0; i < efficiency_curve.size(); ++i) {
        const auto& pt = efficiency_curve[i];
        if (!(pt.efficiency >= 0.0 && pt.efficiency <= 1.0)) {
            out.emplace_back("efficiency_curve[" + std::to_string(i) + "] efficiency outside [0, 1]");
        }
        if (i > 0 && !(pt.p_in_dbm > efficiency_curve[i - 1].p_in_dbm)) {
            out.emplace_back("efficiency_curve must be strictly increasing in input power");
        }
    }
    if (!(load_ohms > 0.0)) {
        out.emplace_back("load_ohms must be > 0");
    }
    return out;
}

void RectifierModel::validate() const
{
    auto v = violations();
    if (!v.empty()) {
        std::string msg = "invalid rectifier model: " + v.front();
        for (std::size_t i = 1; i < v.size(); ++i) {
            msg += "; " + v[i];
        }
        throw InvalidArgument(msg);
    }
}

LeakageModel LeakageModel::circulator(double isolation_db)
{
    if (!(isolation_db >= 0.0)) {
        throw InvalidArgument("circulator isolation must be >= 0 dB");
    }
    LeakageModel m;
    m.kind = LeakageKind::circulator;
    m.circulator_isolation_db = isolation_db;
    return m;
}

LeakageModel LeakageModel::coupling(double floor_dbm, double at_tx_dbm)
{
    LeakageModel m;
    m.kind = LeakageKind::coupling;
    m.coupling_floor_dbm_at_ref = floor_dbm;
    m.ref_tx_power_dbm = at_tx_dbm;
    return m;
}

NoiseSpec NoiseSpec::none(std::uint64_t seed)
{
    return {-std::numeric_limits<double>::infinity(), seed};
}

bool NoiseSpec::is_noiseless() const { return std::isinf(noise_power_dbm) && noise_power_dbm < 0.0; }

double free_space_path_loss_db(const LinkGeometry& geom)
{
    geom.check_far_field();
    return 20.0 * std::log10(4.0 * std::numbers::pi * geom.distance_m / geom.wavelength_m());
}

double friis_received_power(double p_tx_dbm, const AntennaSpec& tx, const AntennaSpec& rx,
                            const LinkGeometry& geom)
{
    return p_tx_dbm + tx.gain_dbi + rx.gain_dbi - free_space_path_loss_db(geom);
}

double backscatter_received_power(double p_tx_dbm, const AntennaSpec& src_tx, const AntennaSpec& node,
                                  const AntennaSpec& mon_rx, const LinkGeometry& dl,
                                  const LinkGeometry& ul, const RectifierModel& rect, bool cmd_high)
{
    const double at_node = friis_received_power(p_tx_dbm, src_tx, node, dl);
    const double reflected = at_node + rect.gamma_db(cmd_high);
    return friis_received_power(reflected, node, mon_rx, ul);
}

double leakage_power(double p_tx_dbm, const LeakageModel& model)
{
    switch (model.kind) {
    case LeakageKind::circulator:
        return p_tx_dbm - model.circulator_isolation_db;
    case LeakageKind::coupling:
        return model.coupling_floor_dbm_at_ref + (p_tx_dbm - model.ref_tx_power_dbm);
    }
    return p_tx_dbm;
}

double combine_noncoherent(std::span<const double> powers_dbm)
{
    if (powers_dbm.empty()) {
        throw EmptyInput("combine_noncoherent needs at least one power");
    }
    // Summing in ascending order makes the result independent of input order.
    std::vector<double> mw;
    mw.reserve(powers_dbm.size());
    for (double p : powers_dbm) {
        mw.push_back(dbm_to_mw(p));
    }
    std::sort(mw.begin(), mw.end());
    double total = 0.0;
    for (double x : mw) {
        total += x;
    }
    return mw_to_dbm(total);
}

double combine_noncoherent(std::initializer_list<double> powers_dbm)
{
    return combine_noncoherent(std::span<const double>(powers_dbm.begin(), powers_dbm.size()));
}

double dynamic_range_db(double p_high_state_dbm, double p_low_state_dbm)
{
    return p_high_state_dbm - p_low_state_dbm;
}

double interpolate_efficiency(std::span<const EfficiencyPoint> curve, double p_in_dbm)
{
    if (curve.empty()) {
        throw EmptyCurve("efficiency curve is empty");
    }
    if (p_in_dbm <= curve.front().p_in_dbm) {
        return curve.front().efficiency;
    }
    if (p_in_dbm >= curve.back().p_in_dbm) {
        return curve.back().efficiency;
    }
    auto hi = std::upper_bound(curve.begin(), curve.end(), p_in_dbm,
                               [](double p, const EfficiencyPoint& pt) { return p < pt.p_in_dbm; });
    auto lo = hi - 1;
    const double t = (p_in_dbm - lo->p_in_dbm) / (hi->p_in_dbm - lo->p_in_dbm);
    return lo->efficiency + t * (hi->efficiency - lo->efficiency);
}

HarvestedDc harvested_dc(double p_in_dbm, const RectifierModel& rect)
{
    const double eta = std::clamp(interpolate_efficiency(rect.efficiency_curve, p_in_dbm), 0.0, 1.0);
    const double p_dc = eta * std::pow(10.0, (p_in_dbm - 30.0) / 10.0);
    return {p_dc, std::sqrt(p_dc * rect.load_ohms)};
}

} // namespace ewave::channel
