#include "occ/camera.hpp"

#include "occ/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace occ {

CameraConfig CameraConfig::with_exposure(double exposure_time, std::size_t rows, std::size_t cols,
                                         unsigned bit_depth, double sensor_gain) {
    CameraConfig cam;
    cam.exposure_time = exposure_time;
    cam.row_rate_hz = 1.0 / exposure_time;
    cam.sensor_gain = sensor_gain;
    cam.rows = rows;
    cam.cols = cols;
    cam.bit_depth = bit_depth;
    cam.validate();
    return cam;
}

void CameraConfig::validate() const {
    if (!(exposure_time > 0.0)) throw Error(ErrorKind::Config, "camera.exposure_time must be > 0");
    if (!(std::abs(row_rate_hz * exposure_time - 1.0) <= 1e-9)) {
        throw Error(ErrorKind::Config, "camera.row_rate_hz must equal 1/exposure_time (readout gaps are not modeled)");
    }
    if (!(sensor_gain > 0.0)) throw Error(ErrorKind::Config, "camera.sensor_gain must be > 0");
    if (rows == 0 || cols == 0) throw Error(ErrorKind::Config, "camera.rows and camera.cols must be >= 1");
    if (bit_depth != 8 && bit_depth != 16) throw Error(ErrorKind::Config, "camera.bit_depth must be 8 or 16");
}

TimingOffset TimingOffset::from_fraction(double fraction, double symbol_duration) {
    if (!(symbol_duration > 0.0)) throw Error(ErrorKind::Config, "symbol_duration must be > 0");
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw Error(ErrorKind::Config, "offset fraction must be in [0, 1), got " + std::to_string(fraction));
    }
    return {fraction * symbol_duration, symbol_duration};
}

std::size_t exposure_steps(double exposure_time, double dt) {
    const double ratio = exposure_time / dt;
    const double m = std::round(ratio);
    if (!(m >= 1.0) || std::abs(m - ratio) > 1e-9 * ratio) {
        throw Error(ErrorKind::Config, "exposure time " + std::to_string(exposure_time) +
                                           " s is not an integer multiple of the grid step " +
                                           std::to_string(dt) +
                                           " s; choose oversampling so that T_s/N_os divides T_exp");
    }
    return static_cast<std::size_t>(m);
}

Waveform matched_filter(const Waveform& w, const CameraConfig& cam) {
    cam.validate();
    const std::size_t m = exposure_steps(cam.exposure_time, w.dt);
    const double scale = cam.sensor_gain * w.dt;
    Waveform r;
    r.dt = w.dt;
    r.t0 = w.t0;
    r.samples.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const std::size_t lo = k + 1 >= m ? k + 1 - m : 0;
        double acc = 0.0;
        for (std::size_t j = lo; j <= k; ++j) acc += w.samples[j];
        r.samples[k] = scale * acc;
    }
    return r;
}

RowSamples sample_rows(const Waveform& r, const CameraConfig& cam, const TimingOffset& offset, std::size_t n_rows) {
    cam.validate();
    if (!(offset.delta >= 0.0 && offset.delta < offset.symbol_duration)) {
        throw Error(ErrorKind::Config, "timing offset must satisfy 0 <= delta < T_s");
    }
    const std::size_t m = exposure_steps(cam.exposure_time, r.dt);
    const double steps = offset.delta / r.dt;
    const double whole = std::round(steps);
    const bool on_grid = std::abs(steps - whole) <= 1e-9;
    const auto base = static_cast<std::size_t>(on_grid ? whole : std::floor(steps));
    const double frac = on_grid ? 0.0 : steps - std::floor(steps);

    const std::size_t needed = n_rows * m + base + (on_grid ? 0 : 1);
    if (n_rows > 0 && needed > r.size()) {
        throw Error(ErrorKind::Shape, "sample_rows: waveform has " + std::to_string(r.size()) +
                                          " samples, " + std::to_string(needed) + " needed for " +
                                          std::to_string(n_rows) + " rows");
    }
    RowSamples y;
    y.row_period = cam.exposure_time;
    y.values.resize(n_rows);
    for (std::size_t n = 0; n < n_rows; ++n) {
        const std::size_t k = (n + 1) * m + base - 1;
        y.values[n] = on_grid ? r.samples[k] : (1.0 - frac) * r.samples[k] + frac * r.samples[k + 1];
    }
    return y;
}

RowSamples normalize_rows(const RowSamples& y, const CameraConfig& cam, const TxConfig& tx, double channel_gain) {
    const double s = cam.sensor_gain * cam.exposure_time * tx.nominal_intensity() * channel_gain;
    if (!(s > 0.0)) throw Error(ErrorKind::Config, "normalize_rows: non-positive signal scale");
    RowSamples out = y;
    for (auto& v : out.values) v = (v - s) / s;
    return out;
}

RowSamples normalize_rows_blind(const RowSamples& y) {
    if (y.values.empty()) throw Error(ErrorKind::UnusableCapture, "capture has no rows");
    const auto [lo_it, hi_it] = std::minmax_element(y.values.begin(), y.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double half_range = 0.5 * (hi - lo);
    const double magnitude = std::max(std::abs(lo), std::abs(hi));
    if (!(half_range > 1e-12 * magnitude) || half_range == 0.0) {
        throw Error(ErrorKind::UnusableCapture, "capture has no intensity modulation (all rows equal)");
    }
    const double center = 0.5 * (hi + lo);
    RowSamples out = y;
    for (auto& v : out.values) v = (v - center) / half_range;
    return out;
}

double full_scale(const CameraConfig& cam, const TxConfig& tx) {
    return cam.sensor_gain * cam.exposure_time * tx.max_intensity;
}

StripeImage render_stripe_image(const RowSamples& y, const CameraConfig& cam, double full_scale) {
    cam.validate();
    if (y.size() > cam.rows) {
        throw Error(ErrorKind::Shape, "render_stripe_image: " + std::to_string(y.size()) +
                                          " row samples exceed " + std::to_string(cam.rows) + " camera rows");
    }
    if (!(full_scale > 0.0)) throw Error(ErrorKind::Config, "render_stripe_image: full scale must be > 0");
    StripeImage img;
    img.rows = cam.rows;
    img.cols = cam.cols;
    img.bit_depth = cam.bit_depth;
    img.pixels.assign(cam.rows * cam.cols, 0);
    const double top = static_cast<double>(cam.max_pixel());
    for (std::size_t n = 0; n < y.size(); ++n) {
        double q = std::round(y.values[n] / full_scale * top);
        if (std::isnan(q)) q = 0.0;
        q = std::clamp(q, 0.0, top);
        const auto px = static_cast<std::uint16_t>(q);
        std::fill_n(img.pixels.begin() + static_cast<std::ptrdiff_t>(n * cam.cols), cam.cols, px);
    }
    return img;
}

RowSamples ingest_stripe_image(const StripeImage& img, ColumnRange roi, double full_scale, double row_period) {
    if (roi.begin >= roi.end) throw Error(ErrorKind::Shape, "ingest_stripe_image: empty column range");
    if (roi.end > img.cols) {
        throw Error(ErrorKind::Shape, "ingest_stripe_image: column range ends at " + std::to_string(roi.end) +
                                          " beyond image width " + std::to_string(img.cols));
    }
    const double width = static_cast<double>(roi.end - roi.begin);
    const double top = static_cast<double>(img.max_pixel());
    RowSamples y;
    y.row_period = row_period;
    y.values.resize(img.rows);
    for (std::size_t r = 0; r < img.rows; ++r) {
        double sum = 0.0;
        for (std::size_t c = roi.begin; c < roi.end; ++c) sum += img.at(r, c);
        y.values[r] = sum / width / top * full_scale;
    }
    return y;
}

RowSamples pick_middle_rows(const RowSamples& y, std::size_t osf) {
    if (osf == 0) throw Error(ErrorKind::Config, "pick_middle_rows: oversampling factor must be >= 1");
    RowSamples out;
    out.row_period = y.row_period * static_cast<double>(osf);
    for (std::size_t n = osf / 2; n < y.size(); n += osf) out.values.push_back(y.values[n]);
    return out;
}

} // namespace occ
