#pragma once

#include "occ/waveform.hpp"

#include <cstdint>
#include <optional>

namespace occ {

/// LED intensity response. Without a cutoff the LED is ideal (bypass);
/// otherwise it is the unit-DC-gain single-pole low-pass
/// y_k = alpha x_k + (1 - alpha) y_{k-1}, alpha = 1 - exp(-2 pi f_3dB dt).
struct LedModel {
    std::optional<double> cutoff_hz;

    static LedModel ideal() { return {}; }
    static LedModel low_pass(double cutoff_hz) { return {cutoff_hz}; }

    bool is_ideal() const noexcept { return !cutoff_hz.has_value(); }
    double alpha(double dt) const;
};

/// Flat optical gain plus AWGN on the simulation grid.
struct OpticalChannel {
    double gain = 1.0;
    double noise_sigma = 0.0; // per grid sample
    std::uint64_t seed = 0;

    void validate() const;
};

/// Filter state starts at `initial_state`, or at the first sample when
/// omitted (no start-up transient for a settled LED).
Waveform apply_led(const Waveform& w, const LedModel& led,
                   std::optional<double> initial_state = std::nullopt);

Waveform apply_channel(const Waveform& w, const OpticalChannel& ch);

/// Per-grid-sample noise sigma for a target per-symbol SNR:
/// SNR = (gain * I_0)^2 * N_os / sigma^2.
double noise_sigma_for_snr(double snr_db, double gain, double nominal_intensity, unsigned oversampling);

} // namespace occ
