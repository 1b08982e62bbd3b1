#pragma once

// RF power budget for the backscatter security link.
//
// Interfaces speak dBm and dBi. Linear (mW or W) values appear only where
// powers are summed or converted to harvested DC.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ewave::channel {

inline constexpr double kSpeedOfLight = 299'792'458.0;

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

struct AntennaSpec {
    double gain_dbi = 0.0;

    /// Gains outside [-10, +30] dBi are accepted but almost certainly a
    /// units mistake. Returns false for those.
    bool gain_in_typical_range() const;
};

struct LinkGeometry {
    double distance_m = 1.0;
    double frequency_hz = 868e6;

    double wavelength_m() const;
    /// Throws InvalidArgument for non-positive values and NearFieldError when
    /// the distance is shorter than one wavelength.
    void check_far_field() const;
};

struct EfficiencyPoint {
    double p_in_dbm;
    double efficiency;
};

/// Behavioral model of the switchable rectifier: a matched state (command
/// low, harvesting) and a mismatched state (command high, reflecting).
struct RectifierModel {
    double gamma_low_db = -20.0;
    double gamma_high_db = -3.0;
    std::vector<EfficiencyPoint> efficiency_curve;
    double load_ohms = 10'000.0;

    static RectifierModel default_model();

    /// Returns one message per violated invariant; empty when valid.
    std::vector<std::string> violations() const;
    void validate() const;

    double gamma_db(bool cmd_high) const { return cmd_high ? gamma_high_db : gamma_low_db; }
};

enum class LeakageKind { circulator, coupling };

/// Power that reaches the monitor with no backscatter present.
struct LeakageModel {
    LeakageKind kind = LeakageKind::coupling;
    double circulator_isolation_db = 20.0;
    double coupling_floor_dbm_at_ref = -57.0;
    double ref_tx_power_dbm = 15.0;

    static LeakageModel circulator(double isolation_db);
    static LeakageModel coupling(double floor_dbm, double at_tx_dbm);
};

/// Additive monitor noise. A value of -infinity for noise_power_dbm means a
/// noiseless monitor.
struct NoiseSpec {
    double noise_power_dbm = -100.0;
    std::uint64_t rng_seed = 0;

    static NoiseSpec none(std::uint64_t seed = 0);
    bool is_noiseless() const;
};

struct HarvestedDc {
    double p_dc_watts;
    double v_out_volts;
};

double free_space_path_loss_db(const LinkGeometry& geom);

double friis_received_power(double p_tx_dbm, const AntennaSpec& tx, const AntennaSpec& rx,
                            const LinkGeometry& geom);

/// Two-hop budget: source -> node over `dl`, reflection at the rectifier
/// in the commanded state, node -> monitor over `ul`.
double backscatter_received_power(double p_tx_dbm, const AntennaSpec& src_tx, const AntennaSpec& node,
                                  const AntennaSpec& mon_rx, const LinkGeometry& dl,
                                  const LinkGeometry& ul, const RectifierModel& rect, bool cmd_high);

double leakage_power(double p_tx_dbm, const LeakageModel& model);

/// Power sum of uncorrelated contributions. Throws EmptyInput.
double combine_noncoherent(std::span<const double> powers_dbm);
double combine_noncoherent(std::initializer_list<double> powers_dbm);

double dynamic_range_db(double p_high_state_dbm, double p_low_state_dbm);

/// Efficiency at `p_in_dbm`, piecewise linear in (dBm, efficiency) and
/// clamped at the curve endpoints.
double interpolate_efficiency(std::span<const EfficiencyPoint> curve, double p_in_dbm);

HarvestedDc harvested_dc(double p_in_dbm, const RectifierModel& rect);

} // namespace ewave::channel
