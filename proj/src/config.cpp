#include "ewave/config.hpp"

#include "ewave/errors.hpp"
#include "ewave/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace ewave::config {

namespace {

using Values = std::map<std::string, std::string>;

enum class Kind { number, number_or_none, integer, u64, boolean, choice, curve, value_list, key_name };

bool value_is(const Values& v, const char* key, std::string_view want)
{
    auto it = v.find(key);
    return it != v.end() && it->second == want;
}

// A key applies unless the selector it depends on says otherwise; when the
// selector itself is missing, everything that could depend on it applies.
bool far_field(const Values& v) { return !value_is(v, "channel.link", "wired"); }
bool circulator(const Values& v) { return !value_is(v, "channel.leakage", "coupling"); }
bool coupling(const Values& v) { return !value_is(v, "channel.leakage", "circulator"); }
bool frame_mode(const Values& v) { return !value_is(v, "waveform.mode", "square"); }
bool square_mode(const Values& v) { return !value_is(v, "waveform.mode", "frame"); }
bool protocol_on(const Values& v) { return !value_is(v, "protocol.enabled", "false"); }
bool always(const Values&) { return true; }
bool optional_key(const Values&) { return false; }

struct KeyDef {
    std::string_view name;
    Kind kind;
    std::vector<std::string_view> choices;
    bool (*applies)(const Values&);
};

const std::vector<KeyDef>& schema()
{
    static const std::vector<KeyDef> keys = {
        {"setup", Kind::choice, {"wired", "anechoic", "custom"}, always},
        {"seed", Kind::u64, {}, always},
        {"channel.link", Kind::choice, {"wired", "far_field"}, always},
        {"channel.p_tx_dbm", Kind::number, {}, always},
        {"channel.frequency_hz", Kind::number, {}, always},
        {"channel.d_dl_m", Kind::number, {}, far_field},
        {"channel.d_ul_m", Kind::number, {}, far_field},
        {"channel.g_src_dbi", Kind::number, {}, far_field},
        {"channel.g_node_dbi", Kind::number, {}, far_field},
        {"channel.g_mon_dbi", Kind::number, {}, far_field},
        {"channel.gamma_low_db", Kind::number, {}, always},
        {"channel.gamma_high_db", Kind::number, {}, always},
        {"channel.efficiency_curve", Kind::curve, {}, always},
        {"channel.load_ohms", Kind::number, {}, always},
        {"channel.leakage", Kind::choice, {"circulator", "coupling"}, always},
        {"channel.circulator_isolation_db", Kind::number, {}, circulator},
        {"channel.coupling_floor_dbm", Kind::number, {}, coupling},
        {"channel.coupling_ref_tx_dbm", Kind::number, {}, coupling},
        {"channel.noise_dbm", Kind::number_or_none, {}, always},
        {"waveform.mode", Kind::choice, {"frame", "square"}, always},
        {"waveform.bit_rate_hz", Kind::number, {}, frame_mode},
        {"waveform.modulation_hz", Kind::number, {}, square_mode},
        {"waveform.oversampling", Kind::integer, {}, always},
        {"waveform.periods", Kind::integer, {}, square_mode},
        {"waveform.lead_in_bits", Kind::integer, {}, frame_mode},
        {"waveform.payload_bytes", Kind::integer, {}, frame_mode},
        {"protocol.enabled", Kind::boolean, {}, always},
        {"protocol.n_keys", Kind::integer, {}, protocol_on},
        {"protocol.key_selection", Kind::choice, {"sequential", "random"}, protocol_on},
        {"protocol.attacker", Kind::choice, {"none", "replay"}, protocol_on},
        {"protocol.storage_capacity_j", Kind::number, {}, protocol_on},
        {"protocol.wake_threshold_j", Kind::number, {}, protocol_on},
        {"protocol.tx_cost_j_per_bit", Kind::number, {}, protocol_on},
        {"protocol.dt_s", Kind::number, {}, protocol_on},
        {"protocol.max_time_s", Kind::number, {}, protocol_on},
        {"sweep.param", Kind::key_name, {}, optional_key},
        {"sweep.values", Kind::value_list, {}, optional_key},
    };
    return keys;
}

const KeyDef* find_key(std::string_view name)
{
    for (const auto& k : schema()) {
        if (k.name == name) {
            return &k;
        }
    }
    return nullptr;
}

const Values& common_defaults()
{
    static const Values v = {
        {"seed", "1"},
        {"channel.gamma_low_db", "-20"},
        {"channel.gamma_high_db", "-3"},
        {"channel.efficiency_curve", "-20:0.05,-10:0.20,0:0.40,10:0.50,20:0.55"},
        {"channel.load_ohms", "10000"},
        {"channel.noise_dbm", "-100"},
        {"waveform.bit_rate_hz", "20000"},
        {"waveform.modulation_hz", "100000"},
        {"waveform.oversampling", "16"},
        {"waveform.periods", "20"},
        {"waveform.lead_in_bits", "4"},
        {"waveform.payload_bytes", "2"},
        {"protocol.n_keys", "16"},
        {"protocol.key_selection", "sequential"},
        {"protocol.attacker", "none"},
        {"protocol.storage_capacity_j", "100e-6"},
        {"protocol.wake_threshold_j", "10e-6"},
        {"protocol.tx_cost_j_per_bit", "1e-9"},
        {"protocol.dt_s", "100e-6"},
        {"protocol.max_time_s", "60"},
    };
    return v;
}

Values preset_values(Setup s)
{
    Values v = common_defaults();
    if (s == Setup::anechoic) {
        v.insert({
            {"setup", "anechoic"},
            {"channel.link", "far_field"},
            {"channel.p_tx_dbm", "15"},
            {"channel.frequency_hz", "868e6"},
            {"channel.d_dl_m", "3.4"},
            {"channel.d_ul_m", "3.4"},
            {"channel.g_src_dbi", "2.5"},
            {"channel.g_node_dbi", "9.2"},
            {"channel.g_mon_dbi", "9.2"},
            {"channel.leakage", "coupling"},
            {"channel.coupling_floor_dbm", "-57"},
            {"channel.coupling_ref_tx_dbm", "15"},
            {"waveform.mode", "frame"},
            {"protocol.enabled", "true"},
        });
    } else if (s == Setup::wired) {
        v.insert({
            {"setup", "wired"},
            {"channel.link", "wired"},
            {"channel.p_tx_dbm", "-15"},
            {"channel.frequency_hz", "876e6"},
            {"channel.leakage", "circulator"},
            {"channel.circulator_isolation_db", "20"},
            {"waveform.mode", "square"},
            {"protocol.enabled", "false"},
        });
    }
    return v;
}

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double x = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(x)) {
        return std::nullopt;
    }
    return x;
}

std::optional<std::uint64_t> parse_u64(std::string_view s)
{
    s = trim(s);
    std::uint64_t x = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return x;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

std::optional<std::vector<channel::EfficiencyPoint>> parse_curve(std::string_view s)
{
    std::vector<channel::EfficiencyPoint> out;
    for (auto item : split(s, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) {
            return std::nullopt;
        }
        auto p = parse_number(parts[0]);
        auto e = parse_number(parts[1]);
        if (!p || !e) {
            return std::nullopt;
        }
        out.push_back({*p, *e});
    }
    return out;
}

std::optional<std::vector<double>> parse_value_list(std::string_view s)
{
    std::vector<double> out;
    if (s.find(':') != std::string_view::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) {
            return std::nullopt;
        }
        auto a = parse_number(parts[0]);
        auto b = parse_number(parts[1]);
        auto step = parse_number(parts[2]);
        if (!a || !b || !step || *step <= 0.0 || *b < *a) {
            return std::nullopt;
        }
        const auto n = static_cast<std::size_t>(std::floor((*b - *a) / *step + 1e-9)) + 1;
        if (n > 1'000'000) {
            return std::nullopt;
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(*a + static_cast<double>(i) * *step);
        }
        return out;
    }
    for (auto item : split(s, ',')) {
        auto x = parse_number(item);
        if (!x) {
            return std::nullopt;
        }
        out.push_back(*x);
    }
    return out;
}

// Returns an error message when `value` does not fit `def`.
std::optional<std::string> check_syntax(const KeyDef& def, std::string_view value)
{
    switch (def.kind) {
    case Kind::number:
        if (!parse_number(value)) {
            return "expected a finite number, got '" + std::string(value) + "'";
        }
        break;
    case Kind::number_or_none:
        if (value != "none" && !parse_number(value)) {
            return "expected a number or 'none', got '" + std::string(value) + "'";
        }
        break;
    case Kind::integer:
    case Kind::u64:
        if (!parse_u64(value)) {
            return "expected a non-negative integer, got '" + std::string(value) + "'";
        }
        break;
    case Kind::boolean:
        if (value != "true" && value != "false") {
            return "expected true or false, got '" + std::string(value) + "'";
        }
        break;
    case Kind::choice:
        if (std::find(def.choices.begin(), def.choices.end(), value) == def.choices.end()) {
            std::string msg = "expected one of {";
            for (std::size_t i = 0; i < def.choices.size(); ++i) {
                msg += (i ? ", " : "") + std::string(def.choices[i]);
            }
            return msg + "}, got '" + std::string(value) + "'";
        }
        break;
    case Kind::curve:
        if (!parse_curve(value)) {
            return "expected comma-separated <dBm>:<efficiency> pairs";
        }
        break;
    case Kind::value_list:
        if (!parse_value_list(value)) {
            return "expected a comma-separated number list or start:stop:step";
        }
        break;
    case Kind::key_name:
        break;
    }
    return std::nullopt;
}

struct ParsedLine {
    int line;
    std::string value;
};

std::map<std::string, ParsedLine> parse_text(std::string_view text)
{
    std::map<std::string, ParsedLine> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "", "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ParseError(line_no, "", "missing key before '='");
        }
        const KeyDef* def = find_key(key);
        if (!def) {
            throw ParseError(line_no, key, "unknown key");
        }
        if (value.empty()) {
            throw ParseError(line_no, key, "missing value");
        }
        if (auto err = check_syntax(*def, value)) {
            throw ParseError(line_no, key, *err);
        }
        if (out.count(key)) {
            throw ParseError(line_no, key, "duplicate key (first set on line " + std::to_string(out[key].line) + ")");
        }
        out.emplace(key, ParsedLine{line_no, value});
    }
    return out;
}

Setup setup_from(std::string_view s)
{
    if (s == "wired") {
        return Setup::wired;
    }
    if (s == "anechoic") {
        return Setup::anechoic;
    }
    return Setup::custom;
}

std::string format_number(double x)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
}

// Converts resolved text values into a typed config, collecting every
// violation instead of stopping at the first.
ScenarioConfig materialize(const Values& v, Setup setup)
{
    std::vector<std::string> errors;
    for (const auto& def : schema()) {
        if (def.applies(v) && !v.count(std::string(def.name))) {
            errors.push_back(std::string(def.name) + ": missing (required for setup="
                             + std::string(to_string(setup)) + ")");
        }
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }

    auto str = [&](const char* k) -> std::string {
        auto it = v.find(k);
        return it == v.end() ? std::string() : it->second;
    };
    auto num = [&](const char* k, double fallback = 0.0) {
        auto it = v.find(k);
        return it == v.end() ? fallback : parse_number(it->second).value_or(fallback);
    };
    auto uint = [&](const char* k, std::uint64_t fallback = 0) {
        auto it = v.find(k);
        return it == v.end() ? fallback : parse_u64(it->second).value_or(fallback);
    };

    ScenarioConfig c;
    c.setup = setup;
    c.resolved = v;
    c.seed = uint("seed", 1);

    auto& l = c.link;
    l.name = std::string(to_string(setup));
    l.link = str("channel.link") == "wired" ? channel::LinkKind::wired : channel::LinkKind::far_field;
    l.p_tx_dbm = num("channel.p_tx_dbm");
    const double f = num("channel.frequency_hz");
    if (l.link == channel::LinkKind::far_field) {
        l.downlink = {num("channel.d_dl_m"), f};
        l.uplink = {num("channel.d_ul_m"), f};
        l.source = {num("channel.g_src_dbi")};
        l.node = {num("channel.g_node_dbi")};
        l.monitor = {num("channel.g_mon_dbi")};
    } else {
        l.source = l.node = l.monitor = channel::AntennaSpec{0.0};
        l.downlink = l.uplink = channel::LinkGeometry{1.0, f};
        if (!(f > 0.0)) {
            errors.emplace_back("channel.frequency_hz: must be > 0");
        }
    }
    l.rectifier.gamma_low_db = num("channel.gamma_low_db");
    l.rectifier.gamma_high_db = num("channel.gamma_high_db");
    l.rectifier.efficiency_curve = parse_curve(str("channel.efficiency_curve")).value_or(
        std::vector<channel::EfficiencyPoint>{});
    l.rectifier.load_ohms = num("channel.load_ohms");
    if (str("channel.leakage") == "circulator") {
        l.leakage.kind = channel::LeakageKind::circulator;
        l.leakage.circulator_isolation_db = num("channel.circulator_isolation_db");
    } else {
        l.leakage = channel::LeakageModel::coupling(num("channel.coupling_floor_dbm"),
                                                    num("channel.coupling_ref_tx_dbm"));
    }
    const std::string noise = str("channel.noise_dbm");
    l.noise.noise_power_dbm = noise == "none" ? -std::numeric_limits<double>::infinity() : num("channel.noise_dbm");
    l.noise.rng_seed = noise_seed(c);

    for (auto& msg : l.violations()) {
        errors.push_back("channel: " + msg);
    }
    if (l.link == channel::LinkKind::far_field) {
        const std::pair<const char*, const channel::AntennaSpec*> antennas[] = {
            {"channel.g_src_dbi", &l.source}, {"channel.g_node_dbi", &l.node}, {"channel.g_mon_dbi", &l.monitor}};
        for (const auto& [name, a] : antennas) {
            if (!a->gain_in_typical_range()) {
                c.warnings.push_back(std::string(name) + ": gain outside the typical [-10, +30] dBi range");
            }
        }
    }

    auto& w = c.waveform;
    w.mode = str("waveform.mode") == "square" ? WaveformMode::square : WaveformMode::frame;
    w.bit_rate_hz = num("waveform.bit_rate_hz", w.bit_rate_hz);
    w.modulation_hz = num("waveform.modulation_hz", w.modulation_hz);
    w.oversampling = static_cast<unsigned>(uint("waveform.oversampling", w.oversampling));
    w.periods = static_cast<unsigned>(uint("waveform.periods", w.periods));
    w.lead_in_bits = uint("waveform.lead_in_bits", w.lead_in_bits);
    w.payload_bytes = uint("waveform.payload_bytes", w.payload_bytes);

    auto check_rate = [&](const char* key, double hz) {
        if (!(hz > 0.0)) {
            errors.push_back(std::string(key) + ": must be > 0");
        } else if (hz > waveform::kMaxModulationHz) {
            errors.push_back(std::string(key) + ": exceeds the 100 kHz modulation ceiling (BitRateTooHigh)");
        }
    };
    if (w.mode == WaveformMode::frame) {
        check_rate("waveform.bit_rate_hz", w.bit_rate_hz);
        if (w.payload_bytes < 1 || w.payload_bytes > waveform::kMaxPayloadBytes) {
            errors.emplace_back("waveform.payload_bytes: must be in [1, 64]");
        }
        if (w.lead_in_bits > 1'000'000) {
            errors.emplace_back("waveform.lead_in_bits: too large");
        }
    } else {
        check_rate("waveform.modulation_hz", w.modulation_hz);
        if (w.periods < 1) {
            errors.emplace_back("waveform.periods: must be >= 1");
        }
    }
    if (w.oversampling < waveform::kMinOversampling || w.oversampling > 4096) {
        errors.emplace_back("waveform.oversampling: must be in [8, 4096] (UndersampledError below 8)");
    }

    auto& p = c.protocol;
    p.enabled = str("protocol.enabled") == "true";
    if (p.enabled) {
        p.n_keys = uint("protocol.n_keys", p.n_keys);
        p.key_selection = str("protocol.key_selection") == "random" ? protocol::KeySelection::random
                                                                    : protocol::KeySelection::sequential;
        p.attacker = str("protocol.attacker") == "replay" ? protocol::AttackerKind::replay
                                                          : protocol::AttackerKind::none;
        p.energy.storage_capacity_j = num("protocol.storage_capacity_j");
        p.energy.wake_threshold_j = num("protocol.wake_threshold_j");
        p.energy.tx_cost_j_per_bit = num("protocol.tx_cost_j_per_bit");
        p.dt_s = num("protocol.dt_s");
        p.max_time_s = num("protocol.max_time_s");
        if (w.mode != WaveformMode::frame) {
            errors.emplace_back("protocol.enabled: sessions need waveform.mode = frame");
        }
        if (p.n_keys < 1) {
            errors.emplace_back("protocol.n_keys: must be >= 1");
        } else if (w.payload_bytes >= 1 && w.payload_bytes < 8
                   && p.n_keys > (std::uint64_t{1} << (8 * w.payload_bytes))) {
            errors.emplace_back("protocol.n_keys: more keys than distinct codes of waveform.payload_bytes bytes");
        }
        for (auto& msg : p.energy.violations()) {
            errors.push_back("protocol: " + msg);
        }
        if (!(p.dt_s > 0.0)) {
            errors.emplace_back("protocol.dt_s: must be > 0");
        }
        if (!(p.max_time_s > p.dt_s)) {
            errors.emplace_back("protocol.max_time_s: must exceed protocol.dt_s");
        }
    }

    const bool has_param = v.count("sweep.param") != 0;
    const bool has_values = v.count("sweep.values") != 0;
    if (has_param != has_values) {
        errors.emplace_back("sweep: sweep.param and sweep.values must be given together");
    } else if (has_param) {
        Sweep s;
        s.param = str("sweep.param");
        if (!is_sweepable(s.param)) {
            errors.push_back("sweep.param: '" + s.param + "' is not a numeric scalar key");
        }
        s.values = parse_value_list(str("sweep.values")).value_or(std::vector<double>{});
        if (s.values.empty()) {
            errors.emplace_back("sweep.values: empty");
        }
        c.sweep = std::move(s);
    }

    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    return c;
}

} // namespace

std::string_view to_string(Setup s)
{
    switch (s) {
    case Setup::wired:
        return "wired";
    case Setup::anechoic:
        return "anechoic";
    case Setup::custom:
        return "custom";
    }
    return "custom";
}

bool is_sweepable(std::string_view key)
{
    const KeyDef* def = find_key(key);
    return def && (def->kind == Kind::number || def->kind == Kind::number_or_none || def->kind == Kind::integer)
        && key != "seed";
}

ScenarioConfig load_config(std::string_view text)
{
    const auto parsed = parse_text(text);
    auto setup_it = parsed.find("setup");
    if (setup_it == parsed.end()) {
        throw ValidationError({"setup: missing (one of wired, anechoic, custom)"});
    }
    const Setup setup = setup_from(setup_it->second.value);

    Values v = preset_values(setup);
    if (setup == Setup::custom) {
        v.clear();
    }
    for (const auto& [key, line] : parsed) {
        v[key] = line.value;
    }
    ScenarioConfig c = materialize(v, setup);

    // Keys that were set explicitly but play no part in this scenario.
    for (const auto& [key, line] : parsed) {
        const KeyDef* def = find_key(key);
        if (def->applies != optional_key && !def->applies(v)) {
            c.warnings.push_back(key + " (line " + std::to_string(line.line) + "): ignored in this scenario");
        }
    }
    return c;
}

ScenarioConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open config " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

ScenarioConfig with_override(const ScenarioConfig& base, const std::string& key, double value)
{
    if (!is_sweepable(key)) {
        throw ValidationError({key + ": not a numeric scalar key"});
    }
    Values v = base.resolved;
    const KeyDef* def = find_key(key);
    if (def->kind == Kind::integer) {
        if (value < 0.0 || value != std::floor(value)) {
            throw ValidationError({key + ": sweep value must be a non-negative integer"});
        }
        v[key] = std::to_string(static_cast<std::uint64_t>(value));
    } else {
        v[key] = format_number(value);
    }
    ScenarioConfig c = materialize(v, base.setup);
    c.warnings = base.warnings;
    return c;
}

ScenarioConfig with_seed(const ScenarioConfig& base, std::uint64_t seed)
{
    Values v = base.resolved;
    v["seed"] = std::to_string(seed);
    ScenarioConfig c = materialize(v, base.setup);
    c.warnings = base.warnings;
    return c;
}

std::vector<std::string> preset_names() { return {"anechoic", "wired"}; }

std::string preset_text(std::string_view name)
{
    Setup s;
    if (name == "anechoic") {
        s = Setup::anechoic;
    } else if (name == "wired") {
        s = Setup::wired;
    } else {
        throw InvalidArgument("unknown preset '" + std::string(name) + "'");
    }
    const Values v = preset_values(s);
    std::string out;
    for (const auto& def : schema()) {
        auto it = v.find(std::string(def.name));
        if (it != v.end()) {
            out += std::string(def.name) + " = " + it->second + "\n";
        }
    }
    return out;
}

std::uint64_t table_seed(const ScenarioConfig& c) { return c.seed; }
std::uint64_t noise_seed(const ScenarioConfig& c) { return stream_seed(c.seed, 1); }
std::uint64_t selection_seed(const ScenarioConfig& c) { return stream_seed(c.seed, 2); }

} // namespace ewave::config
