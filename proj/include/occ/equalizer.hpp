#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace occ {

/// Causal channel y[n0 + n] = sum_{k=0}^{L_c} taps[k] * a[n - k] fitted on
/// the preamble.
struct ChannelEstimate {
    std::vector<double> taps;  // L_c + 1 coefficients
    std::size_t frame_start = 0;
    double residual_norm = 0.0; // ||A_pre taps - y_pre||_2

    std::size_t memory() const noexcept { return taps.empty() ? 0 : taps.size() - 1; }
};

struct ZfEqualizer {
    std::vector<double> taps;  // L_eq coefficients
    std::size_t delay = 0;     // d
    double residual_isi = 0.0; // ||conv(taps, h) - e_d||_2
};

inline constexpr double kDefaultSyncThreshold = 0.5;

/// Pearson correlation of every length-|preamble| window of y against the
/// preamble (window mean removed). Windows with no spread score 0.
/// Throws Error(Shape) if y is shorter than the preamble and Error(Config)
/// for a constant preamble.
std::vector<double> preamble_correlation(std::span<const double> y, std::span<const double> preamble);

/// Lag of the largest correlation; ties (within 1e-12) go to the smallest
/// lag. Throws Error(SyncFailure) when the peak is below `threshold`.
std::size_t find_frame_start(std::span<const double> y, std::span<const double> preamble,
                             double threshold = kDefaultSyncThreshold);

/// Least-squares fit of L_c + 1 taps from rows n0 + L_c ... n0 + N_pre - 1,
/// the rows whose whole channel memory lies inside the preamble.
///
/// Needs N_pre >= 2 (L_c + 1) (Error(Config)) and y covering the preamble
/// (Error(Shape)); a rank-deficient preamble matrix throws
/// Error(EstimationSingular).
ChannelEstimate estimate_channel(std::span<const double> y, std::span<const double> preamble, std::size_t n0,
                                 std::size_t memory);

/// Residual ||conv(g, h) - e_d||_2.
double zf_residual(std::span<const double> channel, std::span<const double> equalizer, std::size_t delay);

/// Least-squares zero-forcing equalizer with L_eq taps for target delay d in
/// {0, ..., L_c + L_eq - 2}. With no delay given every admissible d is tried
/// and the smallest residual wins (ties to the smaller d).
/// Throws Error(DesignSingular) for an all-zero channel.
ZfEqualizer design_zf(std::span<const double> channel, std::size_t n_taps,
                      std::optional<std::size_t> delay = std::nullopt);

/// y_eq[j] = sum_k g[k] y[n0 + j + d - k] for j in [0, frame_len), i.e. the
/// equalizer output re-aligned so index j estimates frame symbol j. Rows
/// before n0 are not used. Throws Error(Shape) when y ends before row
/// n0 + frame_len - 1 + d.
std::vector<double> equalize(std::span<const double> y, const ZfEqualizer& eq, std::size_t n0,
                             std::size_t frame_len);

/// Coupling of row n to (a[n], a[n+1]) for an ideal link with offset delta:
/// (1 - delta/T_s, delta/T_s). Throws Error(Config) unless 0 <= delta < T_s.
std::pair<double, double> analytic_offset_taps(double delta, double symbol_duration);

} // namespace occ
