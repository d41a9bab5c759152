#include "occ/optics.hpp"

#include "occ/error.hpp"
#include "occ/numerics.hpp"

#include <cmath>
#include <numbers>

namespace occ {

double LedModel::alpha(double dt) const {
    if (is_ideal()) return 1.0;
    return 1.0 - std::exp(-2.0 * std::numbers::pi * *cutoff_hz * dt);
}

void OpticalChannel::validate() const {
    if (!(gain > 0.0)) throw Error(ErrorKind::Config, "channel gain must be > 0");
    if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::Config, "noise_sigma must be >= 0");
}

Waveform apply_led(const Waveform& w, const LedModel& led, std::optional<double> initial_state) {
    if (w.samples.empty()) throw Error(ErrorKind::Shape, "apply_led: empty waveform");
    if (led.is_ideal()) return w;
    if (!(*led.cutoff_hz > 0.0)) throw Error(ErrorKind::Config, "LED cutoff must be > 0 Hz");

    const double a = led.alpha(w.dt);
    Waveform out = w;
    double state = initial_state.value_or(w.samples.front());
    for (auto& v : out.samples) {
        state = a * v + (1.0 - a) * state;
        v = state;
    }
    return out;
}

Waveform apply_channel(const Waveform& w, const OpticalChannel& ch) {
    if (w.samples.empty()) throw Error(ErrorKind::Shape, "apply_channel: empty waveform");
    ch.validate();
    Waveform out = w;
    if (ch.noise_sigma == 0.0) {
        for (auto& v : out.samples) v *= ch.gain;
        return out;
    }
    SeededGaussian noise(ch.seed);
    for (auto& v : out.samples) v = ch.gain * v + ch.noise_sigma * noise.next();
    return out;
}

double noise_sigma_for_snr(double snr_db, double gain, double nominal_intensity, unsigned oversampling) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    return gain * nominal_intensity * std::sqrt(static_cast<double>(oversampling) / snr);
}

} // namespace occ
