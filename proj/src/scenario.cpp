#include "ewave/scenario.hpp"

#include <cmath>
#include <vector>

namespace ewave::channel {

LinkScenario LinkScenario::anechoic()
{
    LinkScenario s;
    s.name = "anechoic";
    return s;
}

LinkScenario LinkScenario::wired()
{
    LinkScenario s;
    s.name = "wired";
    s.link = LinkKind::wired;
    s.p_tx_dbm = -15.0;
    s.source = s.node = s.monitor = AntennaSpec{0.0};
    s.downlink = s.uplink = LinkGeometry{1.0, 876e6};
    s.leakage = LeakageModel::circulator(20.0);
    return s;
}

std::vector<std::string> LinkScenario::violations() const
{
    std::vector<std::string> out = rectifier.violations();
    if (!std::isfinite(p_tx_dbm)) {
        out.emplace_back("p_tx_dbm must be finite");
    }
    if (link == LinkKind::far_field) {
        for (const auto* g : {&downlink, &uplink}) {
            try {
                g->check_far_field();
            } catch (const std::exception& e) {
                out.emplace_back(std::string(g == &downlink ? "downlink: " : "uplink: ") + e.what());
            }
        }
        for (const auto* a : {&source, &node, &monitor}) {
            if (!std::isfinite(a->gain_dbi)) {
                out.emplace_back("antenna gain must be finite");
            }
        }
    }
    if (leakage.kind == LeakageKind::circulator && !(leakage.circulator_isolation_db >= 0.0)) {
        out.emplace_back("circulator isolation must be >= 0 dB");
    }
    if (std::isnan(noise.noise_power_dbm) || (std::isinf(noise.noise_power_dbm) && noise.noise_power_dbm > 0.0)) {
        out.emplace_back("noise power must be a finite dBm value or none");
    }
    return out;
}

double node_input_power(const LinkScenario& s)
{
    if (s.link == LinkKind::wired) {
        return s.p_tx_dbm;
    }
    return friis_received_power(s.p_tx_dbm, s.source, s.node, s.downlink);
}

double monitor_backscatter_power(const LinkScenario& s, bool cmd_high)
{
    if (s.link == LinkKind::wired) {
        return s.p_tx_dbm + s.rectifier.gamma_db(cmd_high);
    }
    return backscatter_received_power(s.p_tx_dbm, s.source, s.node, s.monitor, s.downlink, s.uplink,
                                      s.rectifier, cmd_high);
}

MonitorLevels monitor_levels(const LinkScenario& s)
{
    MonitorLevels m{};
    m.p_node_in_dbm = node_input_power(s);
    m.backscatter_high_dbm = monitor_backscatter_power(s, true);
    m.backscatter_low_dbm = monitor_backscatter_power(s, false);
    m.leakage_dbm = leakage_power(s.p_tx_dbm, s.leakage);

    std::vector<double> high{m.backscatter_high_dbm, m.leakage_dbm};
    std::vector<double> low{m.backscatter_low_dbm, m.leakage_dbm};
    if (!s.noise.is_noiseless()) {
        high.push_back(s.noise.noise_power_dbm);
        low.push_back(s.noise.noise_power_dbm);
    }
    m.total_high_dbm = combine_noncoherent(high);
    m.total_low_dbm = combine_noncoherent(low);
    return m;
}

} // namespace ewave::channel
