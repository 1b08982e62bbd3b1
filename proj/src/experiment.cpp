#include "ewave/experiment.hpp"

#include "ewave/errors.hpp"
#include "ewave/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace ewave::experiment {

namespace {

std::string sanitize(std::string s)
{
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') {
            c = ';';
        }
    }
    return s;
}

waveform::Bits frame_on_air(const config::ScenarioConfig& cfg, waveform::Bits& frame_bits)
{
    const protocol::PvkTable table = protocol::generate_table(1, cfg.waveform.payload_bytes, config::table_seed(cfg));
    const auto frame = waveform::build_frame(table.entry(0), cfg.waveform.bit_rate_hz);
    frame_bits = waveform::frame_to_bits(frame);
    waveform::Bits bits(cfg.waveform.lead_in_bits, 0);
    bits.insert(bits.end(), frame_bits.begin(), frame_bits.end());
    return bits;
}

std::string trace_meta(const config::ScenarioConfig& cfg)
{
    return std::string(config::to_string(cfg.setup)) + ";" + waveform::kFormatVersion;
}

void run_session_point(const config::ScenarioConfig& cfg, PointResult& out)
{
    const auto& p = cfg.protocol;
    protocol::PvkTable table = protocol::generate_table(p.n_keys, cfg.waveform.payload_bytes, config::table_seed(cfg));
    protocol::CommunicationNode cn{table, {cfg.waveform.bit_rate_hz}};
    protocol::NodeState node = protocol::make_node(std::move(table), p.energy, cfg.waveform.bit_rate_hz,
                                                   p.key_selection, config::selection_seed(cfg));
    protocol::Attacker attacker(p.attacker);
    protocol::SessionConfig sc;
    sc.dt_s = p.dt_s;
    sc.max_time_s = p.max_time_s;
    sc.lead_in_bits = cfg.waveform.lead_in_bits;
    sc.oversampling = cfg.waveform.oversampling;

    protocol::SessionLog log = protocol::run_session(cfg.link, node, cn, attacker, sc);
    if (log.monitor_trace) {
        log.monitor_trace->meta = trace_meta(cfg);
        out.row.dr_db = log.final.decode.measured_dr_db;
        out.row.threshold_dbm = log.final.decode.threshold_dbm;
    }
    out.row.verdict = std::string(monitor::to_string(log.final.verdict));
    out.row.ber = log.ber;
    out.row.stored_energy_j = node.stored_energy_j;
    out.trace = log.monitor_trace;
    out.session = std::move(log);
}

void run_raw_point(const config::ScenarioConfig& cfg, PointResult& out)
{
    const auto levels = channel::monitor_levels(cfg.link);
    const auto& w = cfg.waveform;
    waveform::EnvelopeTrace trace;
    if (w.mode == config::WaveformMode::square) {
        const auto fs = static_cast<std::uint64_t>(std::llround(w.oversampling * w.modulation_hz));
        const auto cmd = waveform::generate_square_cmd(w.modulation_hz, w.periods / w.modulation_hz, fs);
        trace = waveform::render_cmd(cmd, levels.total_high_dbm, levels.total_low_dbm, fs, cfg.link.noise);
    } else {
        waveform::Bits frame_bits;
        const auto bits = frame_on_air(cfg, frame_bits);
        const auto fs = static_cast<std::uint64_t>(std::llround(w.oversampling * w.bit_rate_hz));
        trace = waveform::synthesize_envelope(bits, levels.total_high_dbm, levels.total_low_dbm, w.bit_rate_hz, fs,
                                              cfg.link.noise);
        const auto decoded = monitor::demodulate(trace, w.bit_rate_hz);
        if (decoded.status != monitor::DecodeStatus::no_sync) {
            out.row.ber = protocol::bit_error_rate(frame_bits, decoded.frame_bits);
        }
    }
    trace.meta = trace_meta(cfg);
    out.row.dr_db = monitor::measure_dynamic_range(trace);
    out.row.threshold_dbm = monitor::estimate_threshold(trace);
    out.trace = std::move(trace);
}

std::size_t missing_dr(const std::vector<PointResult>& pts)
{
    return static_cast<std::size_t>(
        std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.row.ok() && !p.row.dr_db; }));
}

double dr_spread(const std::vector<PointResult>& pts)
{
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& p : pts) {
        if (p.row.ok() && p.row.dr_db) {
            lo = std::min(lo, *p.row.dr_db);
            hi = std::max(hi, *p.row.dr_db);
        }
    }
    return hi >= lo ? hi - lo : 0.0;
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, x);
    return buf;
}

std::vector<CheckResult> evaluate_checks(const config::ScenarioConfig& cfg, const std::vector<PointResult>& pts)
{
    std::vector<CheckResult> checks;

    const auto failed = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return !p.row.ok(); });
    checks.push_back({"points_ok", failed == 0, std::to_string(failed) + " failed point(s)"});

    auto spread_check = [&](const char* name, double limit) {
        const double s = dr_spread(pts);
        const std::size_t missing = missing_dr(pts);
        std::string detail = "spread " + fmt("%.4f", s) + " dB (limit " + fmt("%.1f", limit) + ")";
        if (missing > 0) {
            detail += ", " + std::to_string(missing) + " point(s) without a DR measurement";
        }
        checks.push_back({name, s <= limit && missing == 0, detail});
    };
    if (cfg.sweep && cfg.sweep->param == "channel.p_tx_dbm") {
        spread_check("dr_spread_power", kPowerSweepDrSpreadDb);
    }
    if (cfg.sweep && (cfg.sweep->param == "waveform.modulation_hz" || cfg.sweep->param == "waveform.bit_rate_hz")) {
        spread_check("dr_spread_modulation", kModulationSweepDrSpreadDb);
    }
    if (cfg.protocol.enabled) {
        const auto accepted = std::count_if(pts.begin(), pts.end(), [](const auto& p) {
            return p.session && p.session->final.verdict == monitor::Verdict::accepted;
        });
        checks.push_back({"sessions_accepted", static_cast<std::size_t>(accepted) == pts.size(),
                          std::to_string(accepted) + "/" + std::to_string(pts.size()) + " accepted"});
        if (cfg.protocol.attacker == protocol::AttackerKind::replay) {
            const auto rejected = std::count_if(pts.begin(), pts.end(), [](const auto& p) {
                return p.session && p.session->replay
                    && p.session->replay->verdict == monitor::Verdict::rejected_replay;
            });
            checks.push_back({"replay_rejected", static_cast<std::size_t>(rejected) == pts.size(),
                              std::to_string(rejected) + "/" + std::to_string(pts.size()) + " replays rejected"});
        }
    }
    return checks;
}

} // namespace

bool ExperimentResult::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

PointResult run_point(const config::ScenarioConfig& cfg)
{
    PointResult out;
    out.row.seed = cfg.seed;
    try {
        if (cfg.protocol.enabled) {
            run_session_point(cfg, out);
        } else {
            run_raw_point(cfg, out);
        }
    } catch (const Error& e) {
        out.row.status = "error: " + sanitize(e.what());
    }
    return out;
}

ExperimentResult run_experiment(const config::ScenarioConfig& cfg, unsigned threads)
{
    ExperimentResult result;
    result.config = cfg;

    if (!cfg.sweep) {
        result.points.push_back(run_point(cfg));
    } else {
        const auto& sweep = *cfg.sweep;
        result.points.resize(sweep.values.size());
        auto eval = [&](std::size_t i) {
            PointResult pr;
            try {
                pr = run_point(config::with_override(cfg, sweep.param, sweep.values[i]));
            } catch (const Error& e) {
                pr.row.seed = cfg.seed;
                pr.row.status = "error: " + sanitize(e.what());
            }
            pr.row.sweep_param = sweep.param;
            pr.row.sweep_value = sweep.values[i];
            result.points[i] = std::move(pr);
        };

        if (threads == 0) {
            threads = std::max(1U, std::thread::hardware_concurrency());
        }
        threads = std::min<unsigned>(threads, static_cast<unsigned>(sweep.values.size()));
        if (threads <= 1) {
            for (std::size_t i = 0; i < sweep.values.size(); ++i) {
                eval(i);
            }
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < sweep.values.size(); i = next++) {
                        eval(i);
                    }
                });
            }
            for (auto& th : pool) {
                th.join();
            }
        }
    }
    result.checks = evaluate_checks(cfg, result.points);
    return result;
}

waveform::EnvelopeTrace emit_trace(const config::ScenarioConfig& cfg)
{
    config::ScenarioConfig base = cfg;
    base.sweep.reset();
    PointResult pr = run_point(base);
    if (!pr.trace) {
        throw Error("no trace produced: " + pr.row.status);
    }
    return std::move(*pr.trace);
}

std::string format_row(const CsvRow& row)
{
    auto opt = [](const std::optional<double>& v, const char* f) { return v ? fmt(f, *v) : std::string(); };
    std::string s;
    s += row.sweep_param + ",";
    s += opt(row.sweep_value, "%.10g") + ",";
    s += opt(row.dr_db, "%.6f") + ",";
    s += opt(row.threshold_dbm, "%.6f") + ",";
    s += row.verdict + ",";
    s += opt(row.ber, "%.6g") + ",";
    s += opt(row.stored_energy_j, "%.9e") + ",";
    s += row.status + ",";
    s += std::to_string(row.seed);
    return s;
}

std::string to_csv(const ExperimentResult& result)
{
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& p : result.points) {
        out += format_row(p.row);
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const ExperimentResult& result)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << to_csv(result);
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

std::string summary_json(const ExperimentResult& result)
{
    nlohmann::ordered_json j;
    j["setup"] = std::string(config::to_string(result.config.setup));
    j["seed"] = result.config.seed;
    j["points"] = result.points.size();
    if (result.config.sweep) {
        j["sweep_param"] = result.config.sweep->param;
    }
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : result.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    j["checks"] = std::move(checks);
    j["passed"] = result.all_passed();
    j["warnings"] = result.config.warnings;
    return j.dump(2);
}

} // namespace ewave::experiment
