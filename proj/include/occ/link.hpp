#pragma once

#include "occ/camera.hpp"
#include "occ/equalizer.hpp"
#include "occ/metrics.hpp"
#include "occ/modem.hpp"
#include "occ/optics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

namespace occ {

/// Receiver-side processing parameters.
struct ReceiverParams {
    std::size_t channel_memory = 2;          // L_c (L_c + 1 taps)
    std::size_t equalizer_taps = 31;         // L_eq
    std::optional<std::size_t> delay;        // d; nullopt = auto
    double sync_threshold = kDefaultSyncThreshold;
};

/// Everything needed to simulate one transmitter-to-camera link.
struct LinkConfig {
    TxConfig tx;
    LedModel led;
    double channel_gain = 1.0;
    std::optional<double> snr_db;            // nullopt = noiseless
    CameraConfig camera;
    std::size_t lead_idle_symbols = 8;       // bias-only symbols before the frame
    ReceiverParams receiver;

    /// Rows per symbol, T_s / T_exp; throws Error(Config) unless integral.
    std::size_t rows_per_symbol() const;
    void validate() const;
};

/// Independent seeds for the random parts of one trial.
struct TrialSeeds {
    std::uint64_t payload;
    std::uint64_t noise;
    std::uint64_t slicer;
    std::uint64_t offset;

    static TrialSeeds from(std::uint64_t trial_seed) noexcept;
};

Bits random_bits(std::size_t n, std::uint64_t seed);

struct Capture {
    Waveform transmitted;    // x(t) including idle guard symbols
    Waveform received;       // after LED and optical channel
    Waveform filtered;       // r(t), matched-filter output
    RowSamples rows;         // y[n], one per camera row
    std::size_t frame_row = 0; // first row whose window starts at the frame (delta = 0)
};

/// Transmit `frame` framed by idle bias-level symbols and capture it with
/// the configured camera at `offset`.
Capture simulate_capture(const Frame& frame, const LinkConfig& cfg, const TimingOffset& offset,
                         std::uint64_t noise_seed);

struct DecodeResult {
    std::size_t sync_lag = 0;         // correlation peak
    std::size_t frame_start = 0;      // n0 used for estimation (sync_lag minus one precursor row)
    ChannelEstimate channel;
    ZfEqualizer equalizer;
    std::vector<double> unequalized;  // normalized rows sync_lag .. sync_lag + frame_len - 1
    std::vector<double> equalized;    // equalizer output aligned to frame symbols
    Symbols payload_symbols;
    Bits payload_bits;
};

/// Sync, estimate, design, equalize and slice a normalized symbol-rate row
/// sequence. One row before the correlation peak is included in the causal
/// model (when L_c >= 1) so interference from the next symbol stays causal.
DecodeResult decode_rows(std::span<const double> normalized, std::span<const double> preamble,
                         const PamAlphabet& alphabet, std::size_t payload_symbols, const ReceiverParams& rx,
                         std::uint64_t slicer_seed);

struct LinkRun {
    Frame frame;
    Bits payload_bits;
    Capture capture;
    RowSamples normalized;     // symbol-rate, known-scale normalization
    DecodeResult decoded;
    Bits no_eq_bits;           // payload sliced straight from the synced rows
    LinkReport report;         // ZF path
    ErrorCount no_eq_bit_errors;
};

/// Full chain: frame -> waveform -> LED -> channel -> camera -> receiver.
LinkRun run_link(const Frame& frame, const Bits& payload_bits, const LinkConfig& cfg, const TimingOffset& offset,
                 const TrialSeeds& seeds);

/// Empirical (h_main, h_next) at `offset`: taps fitted with L_c = 2 one row
/// before the known frame row, where the causal taps read
/// [h_next, h_main, 0] for an ideal link.
std::pair<double, double> empirical_offset_taps(const LinkConfig& cfg, const TimingOffset& offset,
                                                std::size_t payload_symbols = 64);

} // namespace occ
