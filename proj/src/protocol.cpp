#include "ewave/protocol.hpp"

#include "ewave/errors.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ewave::protocol {

std::vector<std::string> EnergyParams::violations() const
{
    std::vector<std::string> out;
    if (!(storage_capacity_j > 0.0)) {
        out.emplace_back("storage_capacity_j must be > 0");
    }
    if (!(wake_threshold_j > 0.0 && wake_threshold_j <= storage_capacity_j)) {
        out.emplace_back("wake_threshold_j must be in (0, storage_capacity_j]");
    }
    if (!(tx_cost_j_per_bit >= 0.0)) {
        out.emplace_back("tx_cost_j_per_bit must be >= 0");
    }
    return out;
}

NodeState make_node(PvkTable table, const EnergyParams& energy, double bit_rate_hz, KeySelection selection,
                    std::uint64_t selection_seed)
{
    if (auto v = energy.violations(); !v.empty()) {
        throw InvalidArgument("invalid energy parameters: " + v.front());
    }
    waveform::check_bit_rate(bit_rate_hz);
    NodeState n;
    n.storage_capacity_j = energy.storage_capacity_j;
    n.wake_threshold_j = energy.wake_threshold_j;
    n.tx_cost_j_per_bit = energy.tx_cost_j_per_bit;
    n.bit_rate_hz = bit_rate_hz;
    n.table = std::move(table);
    n.selection = selection;
    n.selection_rng = Rng(selection_seed);
    return n;
}

namespace {

std::size_t pick_key(NodeState& state)
{
    if (state.selection == KeySelection::sequential) {
        return next_key(state.table).first;
    }
    const std::size_t unused = state.table.unused_count();
    if (unused == 0) {
        throw TableExhausted("no unused private key left in the table");
    }
    std::size_t target = state.selection_rng.below(unused);
    for (std::size_t i = 0; i < state.table.size(); ++i) {
        if (!state.table.is_used(i) && target-- == 0) {
            return i;
        }
    }
    throw TableExhausted("no unused private key left in the table");
}

} // namespace

StepResult node_step(NodeState& state, double dt_s, double p_in_dbm, const channel::RectifierModel& rect)
{
    if (!(dt_s > 0.0)) {
        throw InvalidArgument("time step must be positive");
    }
    StepResult r;
    if (state.mode == NodeMode::backscattering) {
        return r;
    }

    const double gained = channel::harvested_dc(p_in_dbm, rect).p_dc_watts * dt_s;
    const double room = state.storage_capacity_j - state.stored_energy_j;
    if (gained > room) {
        r.harvested_j = room;
        r.spilled_j = gained - room;
        state.stored_energy_j = state.storage_capacity_j;
    } else {
        r.harvested_j = gained;
        state.stored_energy_j += gained;
    }

    if (state.stored_energy_j < state.wake_threshold_j) {
        return r;
    }

    const std::size_t index = pick_key(state);
    waveform::Frame frame = waveform::build_frame(state.table.entry(index), state.bit_rate_hz);
    const double cost = state.tx_cost_j_per_bit * static_cast<double>(frame.bit_count());
    if (cost >= state.stored_energy_j) {
        // Not enough to finish a frame; keep charging.
        return r;
    }
    state.stored_energy_j -= cost;
    state.mode = NodeMode::backscattering;
    state.table.mark_used(index);
    r.emission = Emission{index, std::move(frame), cost};
    return r;
}

void finish_backscatter(NodeState& state) { state.mode = NodeMode::harvesting; }

const waveform::EnvelopeTrace& Attacker::replay() const
{
    if (kind_ != AttackerKind::replay || !recorded_) {
        throw InvalidArgument("replay attacker has no recorded trace");
    }
    return *recorded_;
}

void SessionLog::add_event(SessionEvent e)
{
    if (!timeline.empty() && !(e.time_s > timeline.back().time_s)) {
        throw std::logic_error("session events must have strictly increasing time");
    }
    timeline.push_back(std::move(e));
}

void SessionLog::add_energy_sample(double time_s, double stored_energy_j)
{
    if (!energy_trace.empty() && !(time_s > energy_trace.back().time_s)) {
        throw std::logic_error("energy samples must have strictly increasing time");
    }
    energy_trace.push_back({time_s, stored_energy_j});
}

double bit_error_rate(const waveform::Bits& sent, const waveform::Bits& received)
{
    if (sent.empty()) {
        return 0.0;
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) {
        if (i >= received.size() || received[i] != sent[i]) {
            ++errors;
        }
    }
    return static_cast<double>(errors) / static_cast<double>(sent.size());
}

SessionLog run_session(const channel::LinkScenario& scenario, NodeState& node, CommunicationNode& cn,
                       Attacker& attacker, const SessionConfig& config)
{
    if (!(config.dt_s > 0.0) || !(config.max_time_s > 0.0)) {
        throw InvalidArgument("session time step and horizon must be positive");
    }
    if (config.oversampling < waveform::kMinOversampling) {
        throw UndersampledError("session oversampling must be at least 8");
    }
    const channel::MonitorLevels levels = channel::monitor_levels(scenario);
    const auto sample_rate = static_cast<std::uint64_t>(std::llround(config.oversampling * node.bit_rate_hz));

    SessionLog log;
    log.initial_energy_j = node.stored_energy_j;
    log.add_event({0.0, "energize", std::nullopt, std::nullopt, node.stored_energy_j});
    log.add_energy_sample(0.0, node.stored_energy_j);

    double t = 0.0;
    for (std::uint64_t k = 1;; ++k) {
        t = static_cast<double>(k) * config.dt_s;
        if (t > config.max_time_s) {
            log.add_event({t, "timeout", monitor::Verdict::rejected_no_signal, std::nullopt, node.stored_energy_j});
            log.final.verdict = monitor::Verdict::rejected_no_signal;
            log.final.decode.status = monitor::DecodeStatus::no_sync;
            log.total_time_s = t;
            return log;
        }
        StepResult step = node_step(node, config.dt_s, levels.p_node_in_dbm, scenario.rectifier);
        log.harvested_j += step.harvested_j;
        log.spilled_j += step.spilled_j;
        log.add_energy_sample(t, node.stored_energy_j);
        if (step.emission) {
            log.emission_cost_j += step.emission->cost_j;
            log.emission = std::move(step.emission);
            break;
        }
    }

    const Emission& em = *log.emission;
    log.add_event({t, "wake_emit", std::nullopt, std::nullopt, node.stored_energy_j});

    log.sent_bits = waveform::frame_to_bits(em.frame);
    waveform::Bits on_air(config.lead_in_bits, 0);
    on_air.insert(on_air.end(), log.sent_bits.begin(), log.sent_bits.end());
    waveform::EnvelopeTrace trace = waveform::synthesize_envelope(
        on_air, levels.total_high_dbm, levels.total_low_dbm, em.frame.bit_rate_hz, sample_rate, scenario.noise);
    trace.meta = scenario.name + ";" + waveform::kFormatVersion;

    const double frame_time = em.frame.duration_s();
    t += frame_time;
    log.backscatter_time_s = frame_time;
    finish_backscatter(node);
    log.add_energy_sample(t, node.stored_energy_j);

    const monitor::DecodeResult decoded = monitor::demodulate(trace, cn.monitor.bit_rate_hz);
    if (decoded.status != monitor::DecodeStatus::no_sync) {
        log.ber = bit_error_rate(log.sent_bits, decoded.frame_bits);
    }
    log.final = monitor::verify(decoded, cn.table);
    log.add_event({t, "verify", log.final.verdict, decoded.measured_dr_db, node.stored_energy_j});

    if (attacker.kind() == AttackerKind::replay) {
        attacker.record(trace);
        t += config.dt_s;
        log.replay = monitor::verify(monitor::demodulate(attacker.replay(), cn.monitor.bit_rate_hz), cn.table);
        log.add_event({t, "replay_verify", log.replay->verdict, log.replay->decode.measured_dr_db,
                       node.stored_energy_j});
    }
    log.total_time_s = t;
    log.monitor_trace = std::move(trace);
    return log;
}

std::string to_records(const SessionLog& log)
{
    std::string out;
    char buf[256];
    for (const auto& e : log.timeline) {
        const std::string verdict = e.verdict ? std::string(monitor::to_string(*e.verdict)) : std::string();
        char dr[32] = "";
        if (e.measured_dr_db) {
            std::snprintf(dr, sizeof(dr), "%.6f", *e.measured_dr_db);
        }
        std::snprintf(buf, sizeof(buf), "time_s=%.9f,event=%s,verdict=%s,measured_dr_db=%s,stored_energy_j=%.12e\n",
                      e.time_s, e.event.c_str(), verdict.c_str(), dr, e.stored_energy_j);
        out += buf;
    }
    return out;
}

std::string_view to_string(NodeMode m)
{
    return m == NodeMode::harvesting ? "harvesting" : "backscattering";
}

std::string_view to_string(AttackerKind k)
{
    return k == AttackerKind::none ? "none" : "replay";
}

} // namespace ewave::protocol
