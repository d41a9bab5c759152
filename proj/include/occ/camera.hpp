#pragma once

#include "occ/modem.hpp"
#include "occ/waveform.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace occ {

/// Rolling-shutter sensor. Each row integrates for `exposure_time` and rows
/// are read back to back, so the row rate is exactly 1 / exposure_time.
struct CameraConfig {
    double exposure_time = 8e-6;     // T_exp [s]
    double row_rate_hz = 125e3;      // f_row, must equal 1 / T_exp
    double sensor_gain = 1.0;        // G_cam
    std::size_t rows = 1080;
    std::size_t cols = 64;
    unsigned bit_depth = 8;          // 8 or 16

    /// Camera with f_row = 1 / exposure_time.
    static CameraConfig with_exposure(double exposure_time, std::size_t rows = 1080, std::size_t cols = 64,
                                      unsigned bit_depth = 8, double sensor_gain = 1.0);

    /// Throws Error(Config) on T_exp <= 0, f_row != 1/T_exp (1e-9 relative),
    /// G_cam <= 0, empty geometry or bit depth other than 8/16.
    void validate() const;
    std::uint32_t max_pixel() const noexcept { return (1u << bit_depth) - 1u; }
};

/// Offset between symbol boundaries and row exposure windows, constant over
/// one image: 0 <= delta < symbol_duration.
struct TimingOffset {
    double delta = 0.0;
    double symbol_duration = 1.0;

    static TimingOffset from_fraction(double fraction, double symbol_duration);
    double fraction() const noexcept { return delta / symbol_duration; }
};

struct RowSamples {
    std::vector<double> values;
    double row_period = 1.0;

    std::size_t size() const noexcept { return values.size(); }
};

struct StripeImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    unsigned bit_depth = 8;
    std::vector<std::uint16_t> pixels; // row-major

    std::uint16_t at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
    std::uint32_t max_pixel() const noexcept { return (1u << bit_depth) - 1u; }
};

/// Half-open column interval [begin, end).
struct ColumnRange {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Number of grid steps in one exposure; throws Error(Config) naming the
/// required grid when T_exp is not an integer multiple of dt (1e-9 relative).
std::size_t exposure_steps(double exposure_time, double dt);

/// Rectangular matched filter: r_k = (G_cam dt) * sum_{j<m} w_{k-j}, with
/// w_{k<0} = 0 and m = T_exp / dt. r_k is the integral over the exposure
/// window whose last held grid sample is k, i.e. [t_{k+1} - T_exp, t_{k+1}).
/// Output has the input's length and grid.
Waveform matched_filter(const Waveform& w, const CameraConfig& cam);

/// Row n integrates [n T_exp + delta, (n+1) T_exp + delta), i.e. reads r at
/// t = (n+1) T_exp + delta. On-grid offsets read grid index
/// (n+1) m + delta/dt - 1 directly. Off-grid offsets interpolate linearly
/// between neighboring outputs, which is the exact window integral because
/// the running integral of a held waveform is piecewise linear.
/// Throws Error(Shape) when r is too short.
RowSamples sample_rows(const Waveform& r, const CameraConfig& cam, const TimingOffset& offset,
                       std::size_t n_rows);

/// Known-scale normalization: (y - S) / S with S = G_cam T_exp I_0 gain, so
/// ideal symbol levels map back onto the [-1, 1] alphabet.
RowSamples normalize_rows(const RowSamples& y, const CameraConfig& cam, const TxConfig& tx,
                          double channel_gain = 1.0);

/// Unknown-scale normalization for ingested images: maps the capture's
/// minimum and maximum to -1 and +1. The preamble's runs of identical
/// symbols reach both extreme levels, so this pins the ideal scale.
/// Throws Error(UnusableCapture) when the capture has no spread.
RowSamples normalize_rows_blind(const RowSamples& y);

/// Full-scale intensity G_cam T_exp I_max, mapped to the top pixel value.
double full_scale(const CameraConfig& cam, const TxConfig& tx);

/// Rows beyond y are left at 0. Quantization is linear over [0, full_scale],
/// rounds half away from zero and saturates.
StripeImage render_stripe_image(const RowSamples& y, const CameraConfig& cam, double full_scale);

/// Mean pixel of each row over `roi`, mapped back to intensity units.
RowSamples ingest_stripe_image(const StripeImage& img, ColumnRange roi, double full_scale = 1.0,
                               double row_period = 1.0);

/// Keeps one row per symbol when T_s = osf * T_exp: row n * osf + osf / 2.
RowSamples pick_middle_rows(const RowSamples& y, std::size_t osf);

} // namespace occ
