#pragma once

#include <cstddef>
#include <vector>

namespace occ {

/// Uniformly sampled real intensity signal. Sample k holds the value on
/// [t0 + k*dt, t0 + (k+1)*dt).
struct Waveform {
    std::vector<double> samples;
    double dt = 1.0;
    double t0 = 0.0;

    std::size_t size() const noexcept { return samples.size(); }
    double sample_rate() const noexcept { return 1.0 / dt; }
    double duration() const noexcept { return dt * static_cast<double>(samples.size()); }
};

} // namespace occ
