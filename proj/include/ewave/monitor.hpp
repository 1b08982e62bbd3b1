#pragma once

// E-wave monitor: slicing, clock recovery, frame decoding and key
// verification on a received envelope trace.

#include "ewave/pvk_table.hpp"
#include "ewave/waveform.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace ewave::monitor {

using waveform::Bits;
using waveform::Bytes;
using waveform::EnvelopeTrace;

/// The two cluster means of a 2-means partition of the trace's linear
/// powers, in mW.
struct ClusterLevels {
    double low_mw;
    double high_mw;
    std::size_t low_count;
};

/// 2-means on linear power, initialized at (min, max). Computed on sorted
/// samples so the result depends only on the sample distribution. Throws
/// EmptyTrace.
ClusterLevels cluster_levels(const EnvelopeTrace& trace);

/// dBm value of the midpoint (linear) between the two cluster means.
double estimate_threshold(const EnvelopeTrace& trace);

/// dB ratio of the upper to the lower cluster mean.
double measure_dynamic_range(const EnvelopeTrace& trace);

struct BitRecovery {
    Bits bits;                   ///< bit decisions from the frame start onward
    std::size_t sync_offset = 0; ///< sample index of the first preamble bit
    std::size_t samples_per_bit = 0;
    std::size_t preamble_score = 0; ///< preamble bits matched at sync, out of 16
    double threshold_dbm = 0.0;
};

/// Minimum preamble agreement for acquisition.
inline constexpr std::size_t kSyncScore = 15;

/// Slices the trace against estimate_threshold() and searches for the
/// preamble at every sample alignment of the bit centers.
///
/// An alignment qualifies when at least 15 of 16 preamble bits match and
/// the qualifying alignments around it span at least half a bit (a real
/// bit boundary gives a plateau about one bit wide, isolated noise hits do
/// not). From the first qualifying plateau the search looks ahead three
/// bit-times, takes the plateau with the best score and samples at its
/// middle. The look-ahead matters when idle low-state padding precedes the
/// frame: two bit-times early the preamble still scores 15/16.
///
/// Throws NoSync when nothing qualifies, UndersampledError below 8x.
BitRecovery recover_bits(const EnvelopeTrace& trace, double bit_rate_hz);

enum class DecodeStatus { decoded, no_sync, payload_invalid };

struct DecodeResult {
    std::optional<Bytes> payload;
    std::size_t bit_errors_in_preamble = 0;
    double measured_dr_db = 0.0;
    double threshold_dbm = 0.0;
    DecodeStatus status = DecodeStatus::no_sync;
    std::size_t sync_offset = 0;
    Bits frame_bits; ///< sliced bits from the frame start, empty without sync
};

/// `bits` start at the first preamble bit. Checks the sync byte and keeps
/// every whole byte after it as payload; trailing partial bytes are
/// dropped. Level fields are left at zero.
DecodeResult decode_frame(const Bits& bits, std::size_t sync_offset);

/// Full receive chain: levels, threshold, clock recovery and decoding.
/// Never throws NoSync; that outcome is reported as status no_sync.
DecodeResult demodulate(const EnvelopeTrace& trace, double bit_rate_hz);

enum class Verdict { accepted, rejected_unknown_key, rejected_replay, rejected_no_signal };

struct AuthDecision {
    Verdict verdict = Verdict::rejected_no_signal;
    std::optional<std::size_t> matched_key_index;
    DecodeResult decode;
};

/// Checks a decoded code against the table and consumes the entry on
/// acceptance.
AuthDecision verify(const DecodeResult& decode, protocol::PvkTable& table);

std::string_view to_string(DecodeStatus s);
std::string_view to_string(Verdict v);

/// One-line record: verdict, matched_key_index, measured_dr_db,
/// threshold_dbm, status.
std::string to_record(const AuthDecision& d);

} // namespace ewave::monitor
