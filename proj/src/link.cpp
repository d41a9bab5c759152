#include "occ/link.hpp"

#include "occ/error.hpp"
#include "occ/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace occ {

namespace {

/// Runs `fn`, prefixing any Error message with the pipeline stage name.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(stage) + ": " + e.what());
    }
}

} // namespace

std::size_t LinkConfig::rows_per_symbol() const {
    const double ratio = tx.symbol_duration / camera.exposure_time;
    const double k = std::round(ratio);
    if (!(k >= 1.0) || std::abs(k - ratio) > 1e-9 * ratio) {
        throw Error(ErrorKind::Config, "symbol duration must be an integer multiple of the exposure time");
    }
    return static_cast<std::size_t>(k);
}

void LinkConfig::validate() const {
    tx.validate();
    camera.validate();
    if (!(channel_gain > 0.0)) throw Error(ErrorKind::Config, "channel_gain must be > 0");
    if (led.cutoff_hz && !(*led.cutoff_hz > 0.0)) throw Error(ErrorKind::Config, "led_cutoff_hz must be > 0");
    const std::size_t osf = rows_per_symbol();
    if (tx.oversampling % osf != 0) {
        throw Error(ErrorKind::Config, "oversampling must be a multiple of T_s/T_exp so rows align with the grid");
    }
    if (receiver.equalizer_taps == 0) throw Error(ErrorKind::Config, "equalizer taps must be >= 1");
}

TrialSeeds TrialSeeds::from(std::uint64_t trial_seed) noexcept {
    return {derive_seed(trial_seed, 1), derive_seed(trial_seed, 2), derive_seed(trial_seed, 3),
            derive_seed(trial_seed, 4)};
}

Bits random_bits(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    Bits out(n);
    for (auto& b : out) b = rng.next_bit() ? 1 : 0;
    return out;
}

Capture simulate_capture(const Frame& frame, const LinkConfig& cfg, const TimingOffset& offset,
                         std::uint64_t noise_seed) {
    cfg.validate();
    const std::size_t osf = cfg.rows_per_symbol();
    const std::size_t n_os = cfg.tx.oversampling;
    const std::size_t steps_per_row = n_os / osf;
    const auto delta_steps = static_cast<std::size_t>(std::max(0.0, std::ceil(offset.delta / cfg.tx.grid_step())));
    const std::size_t grid_needed = cfg.camera.rows * steps_per_row + delta_steps + 1;
    const std::size_t symbols_needed = (grid_needed + n_os - 1) / n_os + 1;

    Symbols all(cfg.lead_idle_symbols, 0.0);
    const Symbols body = frame.symbols();
    all.insert(all.end(), body.begin(), body.end());
    if (all.size() < symbols_needed) all.resize(symbols_needed, 0.0);
    else all.push_back(0.0);

    Capture cap;
    cap.transmitted = shape_symbols(all, cfg.tx);
    OpticalChannel channel{cfg.channel_gain, 0.0, noise_seed};
    if (cfg.snr_db) {
        channel.noise_sigma =
            noise_sigma_for_snr(*cfg.snr_db, cfg.channel_gain, cfg.tx.nominal_intensity(), cfg.tx.oversampling);
    }
    cap.received = apply_channel(apply_led(cap.transmitted, cfg.led), channel);
    cap.filtered = matched_filter(cap.received, cfg.camera);
    cap.rows = sample_rows(cap.filtered, cfg.camera, offset, cfg.camera.rows);
    cap.frame_row = cfg.lead_idle_symbols * osf;
    return cap;
}

DecodeResult decode_rows(std::span<const double> normalized, std::span<const double> preamble,
                         const PamAlphabet& alphabet, std::size_t payload_symbols, const ReceiverParams& rx,
                         std::uint64_t slicer_seed) {
    const std::size_t frame_len = preamble.size() + payload_symbols;
    DecodeResult out;
    out.sync_lag = in_stage("sync", [&] { return find_frame_start(normalized, preamble, rx.sync_threshold); });
    if (out.sync_lag + frame_len > normalized.size()) {
        throw Error(ErrorKind::Shape, "sync: frame of " + std::to_string(frame_len) + " symbols at row " +
                                          std::to_string(out.sync_lag) + " runs past the last row " +
                                          std::to_string(normalized.size()));
    }
    out.unequalized.assign(normalized.begin() + static_cast<std::ptrdiff_t>(out.sync_lag),
                           normalized.begin() + static_cast<std::ptrdiff_t>(out.sync_lag + frame_len));

    const std::size_t precursor = std::min<std::size_t>({1, rx.channel_memory, out.sync_lag});
    out.frame_start = out.sync_lag - precursor;
    out.channel = in_stage("estimate",
                           [&] { return estimate_channel(normalized, preamble, out.frame_start, rx.channel_memory); });
    out.equalizer = in_stage("design", [&] { return design_zf(out.channel.taps, rx.equalizer_taps, rx.delay); });
    out.equalized = in_stage("equalize", [&] { return equalize(normalized, out.equalizer, out.frame_start, frame_len); });

    const std::span<const double> payload_region(out.equalized.data() + preamble.size(), payload_symbols);
    out.payload_symbols = in_stage("slice", [&] { return slice(payload_region, alphabet, slicer_seed); });
    out.payload_bits = symbols_to_bits(out.payload_symbols, alphabet);
    return out;
}

LinkRun run_link(const Frame& frame, const Bits& payload_bits, const LinkConfig& cfg, const TimingOffset& offset,
                 const TrialSeeds& seeds) {
    LinkRun run{frame, payload_bits, {}, {}, {}, {}, {}, {}};
    run.capture = in_stage("capture", [&] { return simulate_capture(frame, cfg, offset, seeds.noise); });
    run.normalized = normalize_rows(run.capture.rows, cfg.camera, cfg.tx, cfg.channel_gain);
    const std::size_t osf = cfg.rows_per_symbol();
    if (osf > 1) run.normalized = pick_middle_rows(run.normalized, osf);

    run.decoded = decode_rows(run.normalized.values, frame.preamble, frame.alphabet, frame.payload.size(),
                              cfg.receiver, seeds.slicer);

    const std::span<const double> raw_payload(run.decoded.unequalized.data() + frame.preamble.size(),
                                              frame.payload.size());
    const Symbols no_eq_symbols = slice(raw_payload, frame.alphabet, derive_seed(seeds.slicer, 1));
    run.no_eq_bits = symbols_to_bits(no_eq_symbols, frame.alphabet);
    run.no_eq_bit_errors = count_bit_errors(payload_bits, run.no_eq_bits);

    run.report.bits = count_bit_errors(payload_bits, run.decoded.payload_bits);
    run.report.symbols = count_symbol_errors(frame.payload, run.decoded.payload_symbols);
    run.report.snr_db = cfg.snr_db;
    run.report.offset_fraction = offset.fraction();
    run.report.residual_isi = run.decoded.equalizer.residual_isi;
    run.report.estimated_taps = run.decoded.channel.taps;
    return run;
}

std::pair<double, double> empirical_offset_taps(const LinkConfig& cfg, const TimingOffset& offset,
                                                std::size_t payload_symbols) {
    LinkConfig probe = cfg;
    probe.snr_db.reset();
    probe.lead_idle_symbols = std::max<std::size_t>(probe.lead_idle_symbols, 1);
    if (probe.rows_per_symbol() != 1) {
        throw Error(ErrorKind::Config, "offset taps are defined for T_s = T_exp");
    }
    const PamAlphabet bpsk(2);
    const Frame frame = build_frame(default_preamble(), random_bits(payload_symbols, 0x5EED), bpsk);
    probe.camera.rows = probe.lead_idle_symbols + frame.size() + 2;
    const Capture cap = simulate_capture(frame, probe, offset, 0);
    const RowSamples y = normalize_rows(cap.rows, probe.camera, probe.tx, probe.channel_gain);
    const ChannelEstimate est = estimate_channel(y.values, frame.preamble, cap.frame_row - 1, 2);
    return {est.taps[1], est.taps[0]};
}

} // namespace occ
