#include "occ/equalizer.hpp"

#include "occ/error.hpp"
#include "occ/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace occ {

std::vector<double> preamble_correlation(std::span<const double> y, std::span<const double> preamble) {
    const std::size_t n = preamble.size();
    if (n == 0) throw Error(ErrorKind::Config, "preamble is empty");
    if (y.size() < n) {
        throw Error(ErrorKind::Shape, "frame sync: " + std::to_string(y.size()) + " rows is shorter than the " +
                                          std::to_string(n) + "-symbol preamble");
    }
    double p_mean = 0.0;
    for (double p : preamble) p_mean += p;
    p_mean /= static_cast<double>(n);
    std::vector<double> p_centered(n);
    double p_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p_centered[i] = preamble[i] - p_mean;
        p_energy += p_centered[i] * p_centered[i];
    }
    if (!(p_energy > 0.0)) throw Error(ErrorKind::Config, "frame sync: preamble must not be constant");
    const double p_norm = std::sqrt(p_energy);

    std::vector<double> rho(y.size() - n + 1, 0.0);
    for (std::size_t lag = 0; lag < rho.size(); ++lag) {
        const auto window = y.subspan(lag, n);
        double mean = 0.0;
        for (double v : window) mean += v;
        mean /= static_cast<double>(n);
        double dot = 0.0;
        double energy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = window[i] - mean;
            dot += c * p_centered[i];
            energy += c * c;
        }
        if (energy > 0.0) rho[lag] = dot / (std::sqrt(energy) * p_norm);
    }
    return rho;
}

std::size_t find_frame_start(std::span<const double> y, std::span<const double> preamble, double threshold) {
    const auto rho = preamble_correlation(y, preamble);
    std::size_t best = 0;
    for (std::size_t lag = 1; lag < rho.size(); ++lag) {
        if (rho[lag] > rho[best] + 1e-12) best = lag;
    }
    if (!(rho[best] >= threshold)) {
        throw Error(ErrorKind::SyncFailure, "frame sync: correlation peak " + std::to_string(rho[best]) +
                                                " below threshold " + std::to_string(threshold));
    }
    return best;
}

ChannelEstimate estimate_channel(std::span<const double> y, std::span<const double> preamble, std::size_t n0,
                                 std::size_t memory) {
    const std::size_t n_taps = memory + 1;
    if (preamble.size() < 2 * n_taps) {
        throw Error(ErrorKind::Config, "channel estimation: preamble of " + std::to_string(preamble.size()) +
                                           " symbols is too short for " + std::to_string(n_taps) +
                                           " taps (need >= " + std::to_string(2 * n_taps) + ")");
    }
    if (n0 + preamble.size() > y.size()) {
        throw Error(ErrorKind::Shape, "channel estimation: rows end at " + std::to_string(y.size()) +
                                          ", preamble needs rows up to " + std::to_string(n0 + preamble.size()));
    }
    const DenseMatrix a_pre = convolution_matrix(preamble, n_taps, ConvolutionMode::Valid);
    const auto y_pre = y.subspan(n0 + memory, preamble.size() - memory);

    ChannelEstimate est;
    est.frame_start = n0;
    try {
        est.taps = solve_least_squares(a_pre, y_pre);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DesignSingular) throw;
        throw Error(ErrorKind::EstimationSingular, "channel estimation: preamble matrix is rank deficient");
    }
    auto fitted = a_pre.apply(est.taps);
    for (std::size_t i = 0; i < fitted.size(); ++i) fitted[i] -= y_pre[i];
    est.residual_norm = norm2(fitted);
    return est;
}

double zf_residual(std::span<const double> channel, std::span<const double> equalizer, std::size_t delay) {
    auto combined = convolve(channel, equalizer);
    if (delay >= combined.size()) throw Error(ErrorKind::Config, "zf_residual: delay out of range");
    combined[delay] -= 1.0;
    return norm2(combined);
}

ZfEqualizer design_zf(std::span<const double> channel, std::size_t n_taps, std::optional<std::size_t> delay) {
    if (channel.empty()) throw Error(ErrorKind::Config, "ZF design: empty channel");
    if (n_taps == 0) throw Error(ErrorKind::Config, "ZF design: L_eq must be >= 1");
    const std::size_t memory = channel.size() - 1;
    // Delays 0 .. L_c + L_eq - 2; a memoryless channel still admits d = 0.
    const std::size_t max_delay = memory + n_taps >= 2 ? memory + n_taps - 2 : 0;
    if (delay && *delay > max_delay) {
        throw Error(ErrorKind::Config, "ZF design: delay " + std::to_string(*delay) + " outside 0.." +
                                           std::to_string(max_delay));
    }
    const DenseMatrix h = convolution_matrix(channel, n_taps, ConvolutionMode::Full);

    auto solve_for = [&](std::size_t d) {
        std::vector<double> target(h.rows(), 0.0);
        target[d] = 1.0;
        ZfEqualizer eq;
        eq.delay = d;
        eq.taps = solve_least_squares(h, target);
        eq.residual_isi = zf_residual(channel, eq.taps, d);
        return eq;
    };

    if (delay) return solve_for(*delay);

    // Smallest d whose residual is within 1e-12 of the overall minimum.
    std::vector<ZfEqualizer> all;
    all.reserve(max_delay + 1);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d <= max_delay; ++d) {
        all.push_back(solve_for(d));
        lowest = std::min(lowest, all.back().residual_isi);
    }
    for (auto& eq : all) {
        if (eq.residual_isi <= lowest + 1e-12) return std::move(eq);
    }
    return std::move(all.front());
}

std::vector<double> equalize(std::span<const double> y, const ZfEqualizer& eq, std::size_t n0, std::size_t frame_len) {
    if (eq.taps.empty()) throw Error(ErrorKind::Config, "equalize: equalizer has no taps");
    const std::size_t last = n0 + frame_len + eq.delay;
    if (frame_len > 0 && last > y.size()) {
        throw Error(ErrorKind::Shape, "equalize: need rows up to " + std::to_string(last - 1) + ", capture has " +
                                          std::to_string(y.size()));
    }
    std::vector<double> out(frame_len, 0.0);
    for (std::size_t j = 0; j < frame_len; ++j) {
        const std::size_t n = j + eq.delay; // output index relative to n0
        const std::size_t k_max = std::min(n, eq.taps.size() - 1);
        double acc = 0.0;
        for (std::size_t k = 0; k <= k_max; ++k) acc += eq.taps[k] * y[n0 + n - k];
        out[j] = acc;
    }
    return out;
}

std::pair<double, double> analytic_offset_taps(double delta, double symbol_duration) {
    if (!(symbol_duration > 0.0) || !(delta >= 0.0 && delta < symbol_duration)) {
        throw Error(ErrorKind::Config, "analytic_offset_taps: need 0 <= delta < T_s");
    }
    const double f = delta / symbol_duration;
    return {1.0 - f, f};
}

} // namespace occ
