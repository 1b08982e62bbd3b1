#pragma once

#include "ewave/channel.hpp"

#include <string>
#include <vector>

namespace ewave::channel {

enum class LinkKind {
    wired,     ///< source, rectifier and monitor on a circulator (ports 1, 2, 3)
    far_field, ///< three antennas in free space
};

/// Everything needed to turn a TX power into levels at the node and at the
/// monitor.
struct LinkScenario {
    std::string name = "custom";
    LinkKind link = LinkKind::far_field;
    double p_tx_dbm = 15.0;

    AntennaSpec source{2.5};
    AntennaSpec node{9.2};
    AntennaSpec monitor{9.2};
    LinkGeometry downlink{3.4, 868e6};
    LinkGeometry uplink{3.4, 868e6};

    RectifierModel rectifier = RectifierModel::default_model();
    LeakageModel leakage = LeakageModel::coupling(-57.0, 15.0);
    NoiseSpec noise{};

    /// Far-field bench: +2.5 dBi monopole source, +9.2 dBi patches at the
    /// node and monitor, 3.4 m, 868 MHz, coupling floor -57 dBm at +15 dBm.
    static LinkScenario anechoic();
    /// Circulator bench: -15 dBm CW at 876 MHz, 20 dB isolation.
    static LinkScenario wired();

    std::vector<std::string> violations() const;
};

/// Monitor-side levels in both command states, all in dBm. The totals
/// include the noise mean.
struct MonitorLevels {
    double p_node_in_dbm;
    double backscatter_high_dbm;
    double backscatter_low_dbm;
    double leakage_dbm;
    double total_high_dbm;
    double total_low_dbm;

    double dynamic_range_db() const { return channel::dynamic_range_db(total_high_dbm, total_low_dbm); }
};

/// RF power arriving at the rectifier input.
double node_input_power(const LinkScenario& s);

/// Power reaching the monitor from the node's reflection. On the wired bench
/// the circulator is treated as lossless in the forward direction.
double monitor_backscatter_power(const LinkScenario& s, bool cmd_high);

MonitorLevels monitor_levels(const LinkScenario& s);

} // namespace ewave::channel
