#pragma once

// Text exchange format for envelope traces:
//
//   sample_rate_hz=<int>,unit=dbm,meta=<string>
//   <sample>
//   <sample>
//   ...
//
// Samples are written with 17 significant digits so that reading a file
// back yields the identical doubles.

#include "ewave/waveform.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ewave::waveform {

void write_trace(std::ostream& out, const EnvelopeTrace& trace);
EnvelopeTrace read_trace(std::istream& in);

std::string trace_to_string(const EnvelopeTrace& trace);
EnvelopeTrace trace_from_string(const std::string& text);

void save_trace(const std::filesystem::path& path, const EnvelopeTrace& trace);
EnvelopeTrace load_trace(const std::filesystem::path& path);

} // namespace ewave::waveform
