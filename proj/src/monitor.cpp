#include "ewave/monitor.hpp"

#include "ewave/channel.hpp"
#include "ewave/errors.hpp"

#include <algorithm>
#include <cstdio>

namespace ewave::monitor {

using channel::dbm_to_mw;
using channel::mw_to_dbm;

ClusterLevels cluster_levels(const EnvelopeTrace& trace)
{
    if (trace.samples.empty()) {
        throw EmptyTrace("cannot estimate levels of an empty trace");
    }
    const std::size_t n = trace.samples.size();
    std::vector<double> v;
    v.reserve(n);
    for (double s : trace.samples) {
        v.push_back(dbm_to_mw(s));
    }
    std::sort(v.begin(), v.end());
    if (v.front() == v.back()) {
        return {v.front(), v.front(), n};
    }

    // prefix[i] = sum of v[0, i), suffix[i] = sum of v[i, n)
    std::vector<double> prefix(n + 1, 0.0);
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + v[i];
    }
    for (std::size_t i = n; i-- > 0;) {
        suffix[i] = suffix[i + 1] + v[i];
    }

    double lo = v.front();
    double hi = v.back();
    std::size_t split = n + 1;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const auto next = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), mid) - v.begin());
        if (next == split) {
            break;
        }
        split = next;
        if (split == 0 || split == n) {
            const double mean = prefix[n] / static_cast<double>(n);
            return {mean, mean, n};
        }
        lo = prefix[split] / static_cast<double>(split);
        hi = suffix[split] / static_cast<double>(n - split);
    }
    return {lo, hi, split};
}

namespace {

double threshold_from(const ClusterLevels& c) { return mw_to_dbm(0.5 * (c.low_mw + c.high_mw)); }

double dr_from(const ClusterLevels& c) { return mw_to_dbm(c.high_mw) - mw_to_dbm(c.low_mw); }

BitRecovery recover_with_threshold(const EnvelopeTrace& trace, double bit_rate_hz, double threshold_dbm)
{
    const std::size_t spb = waveform::samples_per_bit(trace.sample_rate_hz, bit_rate_hz);
    const std::size_t n = trace.samples.size();
    constexpr std::size_t P = waveform::kPreambleBits;
    if (n < P * spb) {
        throw NoSync("trace shorter than a preamble");
    }

    std::vector<std::uint8_t> sliced(n);
    for (std::size_t i = 0; i < n; ++i) {
        sliced[i] = trace.samples[i] > threshold_dbm ? 1 : 0;
    }

    // score[c]: preamble agreement when bit k is sampled at c + k * spb.
    const std::size_t centers = n - (P - 1) * spb;
    std::vector<std::uint8_t> score(centers);
    for (std::size_t c = 0; c < centers; ++c) {
        std::uint8_t s = 0;
        for (std::size_t k = 0; k < P; ++k) {
            s += sliced[c + k * spb] == waveform::preamble_bit(k) ? 1 : 0;
        }
        score[c] = s;
    }

    const std::size_t min_plateau = std::max<std::size_t>(1, spb / 2);
    std::size_t first = centers;
    for (std::size_t c = 0; c < centers;) {
        if (score[c] < kSyncScore) {
            ++c;
            continue;
        }
        std::size_t e = c;
        while (e + 1 < centers && score[e + 1] >= kSyncScore) {
            ++e;
        }
        if (e - c + 1 >= min_plateau) {
            first = c;
            break;
        }
        c = e + 1;
    }
    if (first == centers) {
        throw NoSync("preamble not found");
    }

    const std::size_t window_end = std::min(centers, first + 3 * spb);
    const auto best = *std::max_element(score.begin() + static_cast<std::ptrdiff_t>(first),
                                        score.begin() + static_cast<std::ptrdiff_t>(window_end));
    std::size_t start = first;
    while (score[start] != best) {
        ++start;
    }
    std::size_t end = start;
    while (end + 1 < centers && score[end + 1] == best) {
        ++end;
    }
    const std::size_t center = (start + end + 1) / 2;

    BitRecovery out;
    out.samples_per_bit = spb;
    out.sync_offset = center >= spb / 2 ? center - spb / 2 : 0;
    out.preamble_score = best;
    out.threshold_dbm = threshold_dbm;
    for (std::size_t i = center; i < n; i += spb) {
        out.bits.push_back(sliced[i]);
    }
    return out;
}

} // namespace

double estimate_threshold(const EnvelopeTrace& trace) { return threshold_from(cluster_levels(trace)); }

double measure_dynamic_range(const EnvelopeTrace& trace) { return dr_from(cluster_levels(trace)); }

BitRecovery recover_bits(const EnvelopeTrace& trace, double bit_rate_hz)
{
    return recover_with_threshold(trace, bit_rate_hz, estimate_threshold(trace));
}

DecodeResult decode_frame(const Bits& bits, std::size_t sync_offset)
{
    constexpr std::size_t P = waveform::kPreambleBits;
    DecodeResult r;
    r.sync_offset = sync_offset;
    r.frame_bits = bits;
    r.status = DecodeStatus::payload_invalid;

    for (std::size_t k = 0; k < P; ++k) {
        if (k >= bits.size() || bits[k] != waveform::preamble_bit(k)) {
            ++r.bit_errors_in_preamble;
        }
    }
    if (bits.size() < waveform::kHeaderBits) {
        return r;
    }

    auto byte_at = [&](std::size_t pos) {
        std::uint8_t b = 0;
        for (std::size_t k = 0; k < 8; ++k) {
            b = static_cast<std::uint8_t>((b << 1) | (bits[pos + k] & 1U));
        }
        return b;
    };

    if (byte_at(P) != waveform::kSyncByte) {
        return r;
    }
    const std::size_t n_bytes = (bits.size() - waveform::kHeaderBits) / 8;
    if (n_bytes == 0 || n_bytes > waveform::kMaxPayloadBytes) {
        return r;
    }
    Bytes payload(n_bytes);
    for (std::size_t i = 0; i < n_bytes; ++i) {
        payload[i] = byte_at(waveform::kHeaderBits + 8 * i);
    }
    r.payload = std::move(payload);
    r.status = DecodeStatus::decoded;
    return r;
}

DecodeResult demodulate(const EnvelopeTrace& trace, double bit_rate_hz)
{
    const ClusterLevels levels = cluster_levels(trace);
    const double threshold = threshold_from(levels);
    const double dr = dr_from(levels);

    DecodeResult r;
    try {
        const BitRecovery rec = recover_with_threshold(trace, bit_rate_hz, threshold);
        r = decode_frame(rec.bits, rec.sync_offset);
    } catch (const NoSync&) {
        r = DecodeResult{};
        r.status = DecodeStatus::no_sync;
        r.bit_errors_in_preamble = waveform::kPreambleBits;
    }
    r.threshold_dbm = threshold;
    r.measured_dr_db = dr;
    return r;
}

AuthDecision verify(const DecodeResult& decode, protocol::PvkTable& table)
{
    AuthDecision d;
    d.decode = decode;
    if (decode.status != DecodeStatus::decoded || !decode.payload) {
        d.verdict = Verdict::rejected_no_signal;
        return d;
    }
    const auto idx = table.find(*decode.payload);
    if (!idx) {
        d.verdict = Verdict::rejected_unknown_key;
        return d;
    }
    d.matched_key_index = *idx;
    if (table.is_used(*idx)) {
        d.verdict = Verdict::rejected_replay;
        return d;
    }
    table.mark_used(*idx);
    d.verdict = Verdict::accepted;
    return d;
}

std::string_view to_string(DecodeStatus s)
{
    switch (s) {
    case DecodeStatus::decoded:
        return "decoded";
    case DecodeStatus::no_sync:
        return "no_sync";
    case DecodeStatus::payload_invalid:
        return "payload_invalid";
    }
    return "unknown";
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::accepted:
        return "accepted";
    case Verdict::rejected_unknown_key:
        return "rejected_unknown_key";
    case Verdict::rejected_replay:
        return "rejected_replay";
    case Verdict::rejected_no_signal:
        return "rejected_no_signal";
    }
    return "unknown";
}

std::string to_record(const AuthDecision& d)
{
    char buf[256];
    const std::string idx = d.matched_key_index ? std::to_string(*d.matched_key_index) : std::string();
    std::snprintf(buf, sizeof(buf), "verdict=%s,matched_key_index=%s,measured_dr_db=%.6f,threshold_dbm=%.6f,status=%s",
                  std::string(to_string(d.verdict)).c_str(), idx.c_str(), d.decode.measured_dr_db,
                  d.decode.threshold_dbm, std::string(to_string(d.decode.status)).c_str());
    return buf;
}

} // namespace ewave::monitor
