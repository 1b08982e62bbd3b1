#pragma once

#include "ewave/config.hpp"
#include "ewave/monitor.hpp"
#include "ewave/protocol.hpp"
#include "ewave/waveform.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ewave::experiment {

inline constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,dr_db,threshold_dbm,verdict,ber,stored_energy_j,status,seed";

inline constexpr double kPowerSweepDrSpreadDb = 1.5;
inline constexpr double kModulationSweepDrSpreadDb = 0.1;

struct CsvRow {
    std::string sweep_param = "none";
    std::optional<double> sweep_value;
    std::optional<double> dr_db;
    std::optional<double> threshold_dbm;
    std::string verdict = "n/a";
    std::optional<double> ber;
    std::optional<double> stored_energy_j;
    std::string status = "ok";
    std::uint64_t seed = 0;

    bool ok() const { return status == "ok"; }
};

struct PointResult {
    CsvRow row;
    std::optional<waveform::EnvelopeTrace> trace;
    std::optional<protocol::SessionLog> session;
};

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

struct ExperimentResult {
    config::ScenarioConfig config;
    std::vector<PointResult> points;
    std::vector<CheckResult> checks;

    bool all_passed() const;
};

/// One scenario evaluation without any sweep: a full session when the
/// protocol is enabled, otherwise a raw trace measurement. Model errors are
/// caught and reported in row.status.
PointResult run_point(const config::ScenarioConfig& cfg);

/// Runs every sweep point (in parallel when `threads` > 1; 0 picks the
/// hardware concurrency) and evaluates the built-in checks. Rows come back
/// in sweep order.
ExperimentResult run_experiment(const config::ScenarioConfig& cfg, unsigned threads = 0);

/// Monitor trace of the base (unswept) configuration.
waveform::EnvelopeTrace emit_trace(const config::ScenarioConfig& cfg);

std::string format_row(const CsvRow& row);
std::string to_csv(const ExperimentResult& result);
void write_csv(const std::filesystem::path& path, const ExperimentResult& result);

/// JSON summary: setup, seed, point count and the check outcomes.
std::string summary_json(const ExperimentResult& result);

} // namespace ewave::experiment
