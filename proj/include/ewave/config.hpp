#pragma once

// Scenario configuration: flat `section.key = value` text with `#`
// comments. `setup = wired | anechoic` pulls in a full preset that the
// remaining lines override; `setup = custom` starts from nothing and every
// applicable key must be given. Unknown keys are rejected.

#include "ewave/protocol.hpp"
#include "ewave/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ewave::config {

enum class Setup { wired, anechoic, custom };
enum class WaveformMode { frame, square };

struct WaveformParams {
    WaveformMode mode = WaveformMode::frame;
    double bit_rate_hz = 20'000.0;
    double modulation_hz = 100'000.0; ///< square-wave command frequency
    unsigned oversampling = waveform::kDefaultOversampling;
    unsigned periods = 20;
    std::size_t lead_in_bits = 4;
    std::size_t payload_bytes = 2;
};

struct ProtocolParams {
    bool enabled = true;
    std::size_t n_keys = 16;
    protocol::KeySelection key_selection = protocol::KeySelection::sequential;
    protocol::AttackerKind attacker = protocol::AttackerKind::none;
    protocol::EnergyParams energy{};
    double dt_s = 100e-6;
    double max_time_s = 60.0;
};

struct Sweep {
    std::string param;
    std::vector<double> values;
};

struct ScenarioConfig {
    Setup setup = Setup::anechoic;
    std::uint64_t seed = 1;
    channel::LinkScenario link;
    WaveformParams waveform;
    ProtocolParams protocol;
    std::optional<Sweep> sweep;

    /// Fully resolved `key -> value` text, preset defaults included. Sweep
    /// points are materialized by overriding one entry and rebuilding.
    std::map<std::string, std::string> resolved;
    /// Non-fatal findings, e.g. an antenna gain outside [-10, +30] dBi.
    std::vector<std::string> warnings;
};

/// Throws ParseError (line/field) for malformed or unknown lines and
/// ValidationError listing every violation for semantic problems.
ScenarioConfig load_config(std::string_view text);
ScenarioConfig load_config_file(const std::filesystem::path& path);

/// Rebuilds `base` with one numeric key replaced. Throws ValidationError.
ScenarioConfig with_override(const ScenarioConfig& base, const std::string& key, double value);

/// Replaces the seed, keeping everything else.
ScenarioConfig with_seed(const ScenarioConfig& base, std::uint64_t seed);

/// True for keys that hold a single number and may be swept.
bool is_sweepable(std::string_view key);

std::vector<std::string> preset_names();
/// Complete preset as config text. Throws InvalidArgument for unknown names.
std::string preset_text(std::string_view name);

std::string_view to_string(Setup s);

/// Seeds derived from the config seed for the independent random streams.
std::uint64_t table_seed(const ScenarioConfig& c);
std::uint64_t noise_seed(const ScenarioConfig& c);
std::uint64_t selection_seed(const ScenarioConfig& c);

} // namespace ewave::config
