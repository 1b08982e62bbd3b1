#include "ewave/trace_io.hpp"

#include "ewave/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ewave::waveform {

namespace {

constexpr std::string_view kRatePrefix = "sample_rate_hz=";
constexpr std::string_view kUnitField = ",unit=dbm,meta=";

std::string_view trim_cr(std::string_view s)
{
    if (!s.empty() && s.back() == '\r') {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

void write_trace(std::ostream& out, const EnvelopeTrace& trace)
{
    if (trace.meta.find_first_of("\r\n") != std::string::npos) {
        throw TraceFormatError("trace meta must be a single line");
    }
    out << kRatePrefix << trace.sample_rate_hz << kUnitField << trace.meta << '\n';
    char buf[64];
    for (double s : trace.samples) {
        if (!std::isfinite(s)) {
            throw TraceFormatError("trace samples must be finite");
        }
        auto res = std::to_chars(buf, buf + sizeof(buf), s, std::chars_format::general, 17);
        out.write(buf, res.ptr - buf);
        out.put('\n');
    }
    if (!out) {
        throw TraceFormatError("failed writing trace");
    }
}

EnvelopeTrace read_trace(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw TraceFormatError("missing trace header");
    }
    std::string_view header = trim_cr(line);
    if (!header.starts_with(kRatePrefix)) {
        throw TraceFormatError("trace header must start with 'sample_rate_hz='");
    }
    header.remove_prefix(kRatePrefix.size());

    EnvelopeTrace trace;
    auto [ptr, ec] = std::from_chars(header.data(), header.data() + header.size(), trace.sample_rate_hz);
    if (ec != std::errc{} || trace.sample_rate_hz == 0) {
        throw TraceFormatError("trace header has an invalid sample rate");
    }
    std::string_view rest(ptr, header.data() + header.size() - ptr);
    if (!rest.starts_with(kUnitField)) {
        throw TraceFormatError("trace header must continue with ',unit=dbm,meta='");
    }
    rest.remove_prefix(kUnitField.size());
    trace.meta = std::string(rest);

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = trim_cr(line);
        if (v.empty()) {
            continue;
        }
        double x = 0.0;
        auto r = std::from_chars(v.data(), v.data() + v.size(), x);
        if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || !std::isfinite(x)) {
            throw TraceFormatError("line " + std::to_string(line_no) + ": invalid sample '" + std::string(v) + "'");
        }
        trace.samples.push_back(x);
    }
    return trace;
}

std::string trace_to_string(const EnvelopeTrace& trace)
{
    std::ostringstream os;
    write_trace(os, trace);
    return os.str();
}

EnvelopeTrace trace_from_string(const std::string& text)
{
    std::istringstream is(text);
    return read_trace(is);
}

void save_trace(const std::filesystem::path& path, const EnvelopeTrace& trace)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw TraceFormatError("cannot open " + path.string() + " for writing");
    }
    write_trace(out, trace);
}

EnvelopeTrace load_trace(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TraceFormatError("cannot open " + path.string());
    }
    return read_trace(in);
}

} // namespace ewave::waveform
