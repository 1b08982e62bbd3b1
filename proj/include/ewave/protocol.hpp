#pragma once

// Session-level simulation: the sensor node's harvest/backscatter state
// machine, the communication node that verifies its code, and a replay
// attacker.

#include "ewave/monitor.hpp"
#include "ewave/pvk_table.hpp"
#include "ewave/rng.hpp"
#include "ewave/scenario.hpp"
#include "ewave/waveform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ewave::protocol {

enum class NodeMode { harvesting, backscattering };
enum class KeySelection { sequential, random };

struct EnergyParams {
    double storage_capacity_j = 100e-6;
    double wake_threshold_j = 10e-6;
    double tx_cost_j_per_bit = 1e-9;

    std::vector<std::string> violations() const;
};

struct NodeState {
    NodeMode mode = NodeMode::harvesting;
    double stored_energy_j = 0.0;
    double storage_capacity_j = 100e-6;
    double wake_threshold_j = 10e-6;
    double tx_cost_j_per_bit = 1e-9;
    double bit_rate_hz = 20'000.0;
    PvkTable table;
    KeySelection selection = KeySelection::sequential;
    Rng selection_rng{0};
};

NodeState make_node(PvkTable table, const EnergyParams& energy, double bit_rate_hz,
                    KeySelection selection = KeySelection::sequential, std::uint64_t selection_seed = 0);

struct Emission {
    std::size_t key_index;
    waveform::Frame frame;
    double cost_j;
};

struct StepResult {
    double harvested_j = 0.0; ///< energy absorbed into storage this step
    double spilled_j = 0.0;   ///< harvest lost to the capacity clamp
    std::optional<Emission> emission;
};

/// Advances a harvesting node by `dt_s`. When the stored energy reaches the
/// wake threshold the node switches to backscattering, emits its next key
/// and pays tx_cost_j_per_bit per frame bit. The emitted key is marked used
/// on the node side. Throws TableExhausted when no key is left.
///
/// A node already in backscattering mode does nothing until
/// finish_backscatter() returns it to harvesting.
StepResult node_step(NodeState& state, double dt_s, double p_in_dbm, const channel::RectifierModel& rect);

void finish_backscatter(NodeState& state);

struct MonitorConfig {
    double bit_rate_hz = 20'000.0;
};

/// Communication node: owns the verifying copy of the table.
struct CommunicationNode {
    PvkTable table;
    MonitorConfig monitor;
};

enum class AttackerKind { none, replay };

class Attacker {
public:
    Attacker() = default;
    explicit Attacker(AttackerKind kind) : kind_(kind) {}

    AttackerKind kind() const { return kind_; }
    bool has_recording() const { return recorded_.has_value(); }
    void record(const waveform::EnvelopeTrace& trace) { recorded_ = trace; }
    /// Throws InvalidArgument if nothing was recorded.
    const waveform::EnvelopeTrace& replay() const;

private:
    AttackerKind kind_ = AttackerKind::none;
    std::optional<waveform::EnvelopeTrace> recorded_;
};

struct SessionConfig {
    double dt_s = 100e-6;
    double max_time_s = 60.0;
    std::size_t lead_in_bits = 4; ///< idle low-state bits captured before the frame
    unsigned oversampling = waveform::kDefaultOversampling;
};

struct SessionEvent {
    double time_s;
    std::string event;
    std::optional<monitor::Verdict> verdict;
    std::optional<double> measured_dr_db;
    double stored_energy_j;
};

struct EnergySample {
    double time_s;
    double stored_energy_j;
};

struct SessionLog {
    std::vector<SessionEvent> timeline;
    std::vector<EnergySample> energy_trace;
    monitor::AuthDecision final;
    std::optional<monitor::AuthDecision> replay;

    double initial_energy_j = 0.0;
    double harvested_j = 0.0;
    double spilled_j = 0.0;
    double emission_cost_j = 0.0;
    double backscatter_time_s = 0.0;
    double total_time_s = 0.0;

    std::optional<Emission> emission;
    waveform::Bits sent_bits;
    std::optional<waveform::EnvelopeTrace> monitor_trace;
    std::optional<double> ber; ///< absent when the monitor never synchronized

    /// Appends an event; throws std::logic_error unless time strictly increases.
    void add_event(SessionEvent e);
    void add_energy_sample(double time_s, double stored_energy_j);

    double backscatter_fraction() const { return total_time_s > 0.0 ? backscatter_time_s / total_time_s : 0.0; }
};

/// Runs one energize / charge / backscatter / verify cycle. With a replay
/// attacker the monitor trace is recorded and presented a second time.
SessionLog run_session(const channel::LinkScenario& scenario, NodeState& node, CommunicationNode& cn,
                       Attacker& attacker, const SessionConfig& config = {});

/// Bit errors between what was sent and what the monitor sliced, over the
/// sent length; missing bits count as errors.
double bit_error_rate(const waveform::Bits& sent, const waveform::Bits& received);

/// Structured text, one record per line with fields time_s, event, verdict,
/// measured_dr_db, stored_energy_j.
std::string to_records(const SessionLog& log);

std::string_view to_string(NodeMode m);
std::string_view to_string(AttackerKind k);

} // namespace ewave::protocol
