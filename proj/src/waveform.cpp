#include "ewave/waveform.hpp"

#include "ewave/errors.hpp"
#include "ewave/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ewave::waveform {

void check_bit_rate(double bit_rate_hz)
{
    if (!(bit_rate_hz > 0.0) || !std::isfinite(bit_rate_hz)) {
        throw InvalidArgument("bit rate must be a positive finite number of hertz");
    }
    if (bit_rate_hz > kMaxModulationHz) {
        throw BitRateTooHigh("modulation rate " + std::to_string(bit_rate_hz)
                             + " Hz exceeds the 100 kHz switching ceiling of the rectifier");
    }
}

Frame build_frame(std::span<const std::uint8_t> payload, double bit_rate_hz)
{
    if (payload.empty()) {
        throw EmptyPayload("payload must contain at least one byte");
    }
    if (payload.size() > kMaxPayloadBytes) {
        throw PayloadTooLarge("payload of " + std::to_string(payload.size()) + " bytes exceeds "
                              + std::to_string(kMaxPayloadBytes));
    }
    check_bit_rate(bit_rate_hz);

    Frame f;
    for (std::size_t i = 0; i < kPreambleBits; ++i) {
        f.preamble_bits[i] = preamble_bit(i);
    }
    f.sync_byte = kSyncByte;
    f.payload.assign(payload.begin(), payload.end());
    f.bit_rate_hz = bit_rate_hz;
    return f;
}

namespace {

void append_byte_msb_first(Bits& out, std::uint8_t b)
{
    for (int k = 7; k >= 0; --k) {
        out.push_back(static_cast<std::uint8_t>((b >> k) & 1U));
    }
}

void check_levels(double p_high_dbm, double p_low_dbm)
{
    if (!std::isfinite(p_high_dbm) || !std::isfinite(p_low_dbm)) {
        throw InvalidArgument("state levels must be finite dBm values");
    }
    if (p_high_dbm < p_low_dbm) {
        throw InvertedLevels("high-state level is below low-state level");
    }
}

// Zero noise leaves the level untouched so that clean traces carry the
// exact input values.
class SampleRenderer {
public:
    SampleRenderer(double p_high_dbm, double p_low_dbm, const channel::NoiseSpec& noise)
        : high_dbm_(p_high_dbm),
          low_dbm_(p_low_dbm),
          high_mw_(channel::dbm_to_mw(p_high_dbm)),
          low_mw_(channel::dbm_to_mw(p_low_dbm)),
          noisy_(!noise.is_noiseless()),
          sigma_mw_(noisy_ ? channel::dbm_to_mw(noise.noise_power_dbm) : 0.0),
          rng_(noise.rng_seed)
    {
    }

    double operator()(bool high)
    {
        if (!noisy_) {
            return high ? high_dbm_ : low_dbm_;
        }
        constexpr double floor_mw = kNoiseFloorWatts * 1e3;
        const double mw = (high ? high_mw_ : low_mw_) + sigma_mw_ * rng_.normal();
        return channel::mw_to_dbm(std::max(mw, floor_mw));
    }

private:
    double high_dbm_;
    double low_dbm_;
    double high_mw_;
    double low_mw_;
    bool noisy_;
    double sigma_mw_;
    Rng rng_;
};

} // namespace

Bits frame_to_bits(const Frame& frame)
{
    Bits out;
    out.reserve(frame.bit_count());
    out.insert(out.end(), frame.preamble_bits.begin(), frame.preamble_bits.end());
    append_byte_msb_first(out, frame.sync_byte);
    for (auto b : frame.payload) {
        append_byte_msb_first(out, b);
    }
    return out;
}

std::size_t samples_per_bit(std::uint64_t sample_rate_hz, double bit_rate_hz)
{
    if (!(bit_rate_hz > 0.0)) {
        throw InvalidArgument("bit rate must be positive");
    }
    const double ratio = static_cast<double>(sample_rate_hz) / bit_rate_hz;
    if (ratio < kMinOversampling) {
        throw UndersampledError("sample rate " + std::to_string(sample_rate_hz) + " Hz is below "
                                + std::to_string(kMinOversampling) + "x the bit rate");
    }
    return static_cast<std::size_t>(std::llround(ratio));
}

EnvelopeTrace synthesize_envelope(std::span<const std::uint8_t> bits, double p_high_dbm, double p_low_dbm,
                                  double bit_rate_hz, std::uint64_t sample_rate_hz,
                                  const channel::NoiseSpec& noise)
{
    const std::size_t spb = samples_per_bit(sample_rate_hz, bit_rate_hz);
    check_levels(p_high_dbm, p_low_dbm);

    EnvelopeTrace trace;
    trace.sample_rate_hz = sample_rate_hz;
    trace.meta = kFormatVersion;
    trace.samples.reserve(bits.size() * spb);

    SampleRenderer render(p_high_dbm, p_low_dbm, noise);
    for (auto bit : bits) {
        for (std::size_t k = 0; k < spb; ++k) {
            trace.samples.push_back(render(bit != 0));
        }
    }
    return trace;
}

Bits generate_square_cmd(double freq_hz, double duration_s, std::uint64_t sample_rate_hz)
{
    check_bit_rate(freq_hz);
    if (!(duration_s > 0.0)) {
        throw InvalidArgument("duration must be positive");
    }
    if (static_cast<double>(sample_rate_hz) < kMinOversampling * freq_hz) {
        throw UndersampledError("sample rate is below 8x the square-wave frequency");
    }
    const auto n = static_cast<std::size_t>(std::llround(duration_s * static_cast<double>(sample_rate_hz)));
    const double fs = static_cast<double>(sample_rate_hz);
    Bits cmd(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Phase in half-periods since t = 0; even half-periods are high.
        const auto half = static_cast<std::uint64_t>(std::floor(2.0 * freq_hz * static_cast<double>(i) / fs));
        cmd[i] = (half % 2 == 0) ? 1 : 0;
    }
    return cmd;
}

EnvelopeTrace render_cmd(std::span<const std::uint8_t> cmd_per_sample, double p_high_dbm, double p_low_dbm,
                         std::uint64_t sample_rate_hz, const channel::NoiseSpec& noise)
{
    if (sample_rate_hz == 0) {
        throw InvalidArgument("sample rate must be positive");
    }
    check_levels(p_high_dbm, p_low_dbm);

    EnvelopeTrace trace;
    trace.sample_rate_hz = sample_rate_hz;
    trace.meta = kFormatVersion;
    trace.samples.reserve(cmd_per_sample.size());
    SampleRenderer render(p_high_dbm, p_low_dbm, noise);
    for (auto c : cmd_per_sample) {
        trace.samples.push_back(render(c != 0));
    }
    return trace;
}

} // namespace ewave::waveform
