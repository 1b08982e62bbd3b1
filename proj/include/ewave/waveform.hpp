#pragma once

// OOK framing of private-key codes and synthesis of the envelope the monitor
// sees. On-air format (v1):
//
//   16-bit preamble 1010...10 | sync byte 0xD3 | payload, 1..64 bytes
//
// Bytes go out MSB first. NRZ: each bit holds one command state for
// 1/bit_rate seconds, so a square command at f Hz is an alternating bit
// stream at 2f bit/s.

#include "ewave/channel.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ewave::waveform {

using Bits = std::vector<std::uint8_t>;
using Bytes = std::vector<std::uint8_t>;

inline constexpr double kMaxModulationHz = 100'000.0;
inline constexpr std::size_t kMaxPayloadBytes = 64;
inline constexpr std::size_t kPreambleBits = 16;
inline constexpr std::uint8_t kSyncByte = 0xD3;
inline constexpr std::size_t kHeaderBits = kPreambleBits + 8;
inline constexpr unsigned kMinOversampling = 8;
inline constexpr unsigned kDefaultOversampling = 16;
inline constexpr double kNoiseFloorWatts = 1e-18;
inline constexpr const char* kFormatVersion = "ook-v1";

/// Expected preamble bit at position i.
constexpr std::uint8_t preamble_bit(std::size_t i) { return (i % 2 == 0) ? 1 : 0; }

struct Frame {
    std::array<std::uint8_t, kPreambleBits> preamble_bits{};
    std::uint8_t sync_byte = kSyncByte;
    Bytes payload;
    double bit_rate_hz = 20'000.0;

    std::size_t bit_count() const { return kHeaderBits + 8 * payload.size(); }
    double duration_s() const { return static_cast<double>(bit_count()) / bit_rate_hz; }
};

struct EnvelopeTrace {
    std::uint64_t sample_rate_hz = 0;
    std::vector<double> samples; ///< received power, dBm
    std::string meta;

    double duration_s() const
    {
        return static_cast<double>(samples.size()) / static_cast<double>(sample_rate_hz);
    }
};

/// Throws BitRateTooHigh above 100 kHz and InvalidArgument for rates <= 0.
void check_bit_rate(double bit_rate_hz);

Frame build_frame(std::span<const std::uint8_t> payload, double bit_rate_hz);

Bits frame_to_bits(const Frame& frame);

/// Samples per bit: round(sample_rate / bit_rate). Throws
/// UndersampledError below 8x oversampling.
std::size_t samples_per_bit(std::uint64_t sample_rate_hz, double bit_rate_hz);

/// Each bit is rendered as samples_per_bit() samples at p_high_dbm (1) or
/// p_low_dbm (0). Gaussian noise with standard deviation equal to the noise
/// power is added to every sample in the linear domain and the result is
/// clipped at 1e-18 W.
EnvelopeTrace synthesize_envelope(std::span<const std::uint8_t> bits, double p_high_dbm, double p_low_dbm,
                                  double bit_rate_hz, std::uint64_t sample_rate_hz,
                                  const channel::NoiseSpec& noise);

/// Command level per sample for a 50% duty square wave starting high.
Bits generate_square_cmd(double freq_hz, double duration_s, std::uint64_t sample_rate_hz);

/// Renders a per-sample command sequence (one entry per output sample), as
/// produced by generate_square_cmd.
EnvelopeTrace render_cmd(std::span<const std::uint8_t> cmd_per_sample, double p_high_dbm, double p_low_dbm,
                         std::uint64_t sample_rate_hz, const channel::NoiseSpec& noise);

} // namespace ewave::waveform
