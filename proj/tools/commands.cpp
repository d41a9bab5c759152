#include "commands.hpp"

#include "occ/numerics.hpp"
#include "occ/pgm.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

namespace occ::app {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::SyncFailure: return kExitSyncFailure;
    case ErrorKind::UnusableCapture: return kExitUnusableCapture;
    case ErrorKind::EstimationSingular: return kExitEstimationSingular;
    case ErrorKind::DesignSingular: return kExitDesignSingular;
    case ErrorKind::Shape: return kExitShape;
    case ErrorKind::Domain: return kExitDomain;
    }
    return kExitInternal;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json error_json(const Error& e) {
    return {{"status", "error"}, {"reason", std::string(to_string(e.kind()))}, {"message", e.what()},
            {"exit_code", exit_code_for(e.kind())}};
}

double resolve_offset(const OffsetSpec& spec, std::uint64_t seed) {
    if (spec) return *spec;
    CounterRng rng(seed);
    return rng.next_uniform();
}

std::string snr_text(const std::optional<double>& snr) { return snr ? format_double(*snr) : "inf"; }

json link_report_json(const LinkReport& r) {
    return {{"ber", r.ber()},
            {"ser", r.ser()},
            {"n_bits", r.bits.total},
            {"n_symbols", r.symbols.total},
            {"bit_errors", r.bits.errors},
            {"symbol_errors", r.symbols.errors},
            {"snr_db", r.snr_db ? json(*r.snr_db) : json(nullptr)},
            {"offset_fraction", r.offset_fraction},
            {"residual_isi", r.residual_isi},
            {"estimated_taps", r.estimated_taps}};
}

} // namespace

int cmd_simulate(const RunConfig& cfg, const fs::path& out, const SimulateOptions& opts) {
    cfg.validate();
    ensure_dir(out);
    const LinkConfig link = cfg.link_config();
    const TrialSeeds seeds = TrialSeeds::from(derive_seed(cfg.master_seed, 0));
    const PamAlphabet alphabet = cfg.alphabet();
    const Bits payload_bits = cfg.payload_for(seeds.payload);
    const Frame frame = build_frame(cfg.preamble_symbols(), payload_bits, alphabet);
    const double fraction = resolve_offset(cfg.offset_fraction, seeds.offset);
    const TimingOffset offset = TimingOffset::from_fraction(fraction, cfg.symbol_duration);
    const std::size_t osf = link.rows_per_symbol();
    if (link.camera.rows < (cfg.lead_idle_symbols + frame.size()) * osf) {
        throw Error(ErrorKind::Config, "config field 'camera.rows': " + std::to_string(link.camera.rows) +
                                           " rows cannot hold the idle lead and the " +
                                           std::to_string(frame.size()) + "-symbol frame");
    }

    const Capture cap = simulate_capture(frame, link, offset, seeds.noise);
    RowSamples raw = cap.rows;
    RowSamples normalized = normalize_rows(cap.rows, link.camera, link.tx, link.channel_gain);
    if (osf > 1) {
        raw = pick_middle_rows(raw, osf);
        normalized = pick_middle_rows(normalized, osf);
    }
    write_pgm(out / "capture.pgm", render_stripe_image(cap.rows, link.camera, full_scale(link.camera, link.tx)));

    // Contrast over rows that see frame symbols only (not the idle guard).
    const std::size_t first = cfg.lead_idle_symbols;
    const std::size_t interior = frame.size() >= 3 ? frame.size() - 2 : frame.size();
    const std::size_t interior_first = frame.size() >= 3 ? first + 1 : first;
    const double contrast =
        peak_to_peak(std::span<const double>(normalized.values).subspan(interior_first, interior));

    json report;
    report["capture"] = {{"rows", link.camera.rows},
                         {"frame_row", cap.frame_row},
                         {"rows_per_symbol", osf},
                         {"offset_fraction", fraction},
                         {"row_contrast", contrast}};
    report["config"] = to_json(cfg);

    if (opts.write_waveform) {
        std::string text = "t,x,r\n";
        for (std::size_t k = 0; k < cap.transmitted.size(); ++k) {
            text += format_double(cap.transmitted.dt * static_cast<double>(k)) + "," +
                    format_double(cap.transmitted.samples[k]) + "," + format_double(cap.filtered.samples[k]) + "\n";
        }
        write_text(out / "waveform.csv", text);
    }

    DecodeResult decoded;
    try {
        decoded = decode_rows(normalized.values, frame.preamble, alphabet, frame.payload.size(), link.receiver,
                              seeds.slicer);
    } catch (const Error& e) {
        report.update(error_json(e));
        write_json(out / "report.json", report);
        return exit_code_for(e.kind());
    }

    LinkReport lr;
    lr.bits = count_bit_errors(payload_bits, decoded.payload_bits);
    lr.symbols = count_symbol_errors(frame.payload, decoded.payload_symbols);
    lr.snr_db = cfg.snr_db;
    lr.offset_fraction = fraction;
    lr.residual_isi = decoded.equalizer.residual_isi;
    lr.estimated_taps = decoded.channel.taps;

    const std::span<const double> raw_payload(decoded.unequalized.data() + frame.preamble.size(),
                                              frame.payload.size());
    const Bits no_eq_bits = symbols_to_bits(slice(raw_payload, alphabet, derive_seed(seeds.slicer, 1)), alphabet);

    report["status"] = "ok";
    report["report"] = link_report_json(lr);
    report["report"]["ber_no_eq"] = count_bit_errors(payload_bits, no_eq_bits).rate();
    report["equalizer"] = {{"delay", decoded.equalizer.delay}, {"taps", decoded.equalizer.taps}};
    report["sync"] = {{"lag", decoded.sync_lag},
                      {"frame_start", decoded.frame_start},
                      {"estimation_residual", decoded.channel.residual_norm}};

    const std::span<const double> eq_preamble(decoded.equalized.data(), frame.preamble.size());
    const Symbols preamble_sliced = slice(eq_preamble, alphabet, derive_seed(seeds.slicer, 2));
    const Symbols tx = frame.symbols();
    std::string csv = "index,tx_symbol,y_raw,y_normalized,y_equalized,sliced_symbol\n";
    for (std::size_t j = 0; j < tx.size(); ++j) {
        const double sliced =
            j < frame.preamble.size() ? preamble_sliced[j] : decoded.payload_symbols[j - frame.preamble.size()];
        csv += std::to_string(j) + "," + format_double(tx[j]) + "," +
               format_double(raw.values[decoded.sync_lag + j]) + "," + format_double(decoded.unequalized[j]) + "," +
               format_double(decoded.equalized[j]) + "," + format_double(sliced) + "\n";
    }
    write_text(out / "samples.csv", csv);
    write_json(out / "report.json", report);
    return kExitOk;
}

int cmd_sweep_ber(const RunConfig& cfg, const fs::path& out) {
    cfg.validate();
    ensure_dir(out);
    const PamAlphabet alphabet = cfg.alphabet();
    const Symbols preamble = cfg.preamble_symbols();
    const std::size_t n_snr = cfg.sweep.snr_db.size();
    const std::size_t trials = cfg.sweep.trials;
    const std::size_t n_points = cfg.sweep.offsets.size() * n_snr;
    const std::size_t n_jobs = n_points * trials;

    struct TrialResult {
        ErrorCount no_eq;
        ErrorCount zf;
        double residual_isi = 0.0;
    };
    std::vector<TrialResult> results(n_jobs);
    std::vector<std::optional<Error>> failures(n_jobs);

    auto run_job = [&](std::size_t job) {
        const std::size_t point = job / trials;
        const OffsetSpec& offset_spec = cfg.sweep.offsets[point / n_snr];
        RunConfig trial_cfg = cfg;
        trial_cfg.snr_db = cfg.sweep.snr_db[point % n_snr];
        LinkConfig link = trial_cfg.link_config();
        link.receiver.sync_threshold = -std::numeric_limits<double>::infinity();
        const TrialSeeds seeds = TrialSeeds::from(derive_seed(cfg.master_seed, job));
        const Bits bits = cfg.payload_for(seeds.payload);
        const Frame frame = build_frame(preamble, bits, alphabet);
        const TimingOffset offset =
            TimingOffset::from_fraction(resolve_offset(offset_spec, seeds.offset), cfg.symbol_duration);
        const LinkRun run = run_link(frame, bits, link, offset, seeds);
        results[job] = {run.no_eq_bit_errors, run.report.bits, run.report.residual_isi};
    };

    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(cfg.sweep.threads, std::max<std::size_t>(n_jobs, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < n_jobs; job = next++) {
            try {
                run_job(job);
            } catch (const Error& e) {
                failures[job] = e;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& f : failures)
        if (f) throw *f;

    std::string csv = "offset_fraction,snr_db,n_bits,ber_no_eq,ber_zf,mean_residual_isi\n";
    for (std::size_t point = 0; point < n_points; ++point) {
        ErrorCount no_eq;
        ErrorCount zf;
        double isi_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto& r = results[point * trials + t];
            no_eq += r.no_eq;
            zf += r.zf;
            isi_sum += r.residual_isi;
        }
        const OffsetSpec& o = cfg.sweep.offsets[point / n_snr];
        csv += (o ? format_double(*o) : std::string("random")) + "," + snr_text(cfg.sweep.snr_db[point % n_snr]) +
               "," + std::to_string(zf.total) + "," + format_double(no_eq.rate()) + "," + format_double(zf.rate()) +
               "," + format_double(isi_sum / static_cast<double>(trials)) + "\n";
    }
    write_text(out / "sweep.csv", csv);
    return kExitOk;
}

int cmd_decode_image(const fs::path& image, const RunConfig& cfg, const fs::path& out) {
    cfg.validate();
    ensure_dir(out);
    json report;
    report["config"] = to_json(cfg);
    report["image"] = image.string();
    try {
        const StripeImage img = read_pgm(image);
        const ColumnRange roi = cfg.roi_cols ? ColumnRange{cfg.roi_cols->first, cfg.roi_cols->second}
                                             : ColumnRange{0, img.cols};
        const LinkConfig link = cfg.link_config();
        const std::size_t osf = link.rows_per_symbol();
        RowSamples rows = ingest_stripe_image(img, roi, 1.0, link.camera.exposure_time);
        rows = normalize_rows_blind(rows);
        if (osf > 1) rows = pick_middle_rows(rows, osf);

        const TrialSeeds seeds = TrialSeeds::from(derive_seed(cfg.master_seed, 0));
        const PamAlphabet alphabet = cfg.alphabet();
        const Symbols preamble = cfg.preamble_symbols();
        const DecodeResult decoded =
            decode_rows(rows.values, preamble, alphabet, cfg.payload_symbol_count(), link.receiver, seeds.slicer);

        std::string bits;
        bits.reserve(decoded.payload_bits.size() * 2);
        for (auto b : decoded.payload_bits) {
            bits.push_back(static_cast<char>('0' + b));
            bits.push_back('\n');
        }
        write_text(out / "decoded.bits", bits);

        const Bits reference = cfg.payload_for(seeds.payload);
        report["status"] = "ok";
        report["n_bits"] = decoded.payload_bits.size();
        report["estimated_taps"] = decoded.channel.taps;
        report["residual_isi"] = decoded.equalizer.residual_isi;
        report["equalizer"] = {{"delay", decoded.equalizer.delay}, {"taps", decoded.equalizer.taps}};
        report["sync"] = {{"lag", decoded.sync_lag},
                          {"frame_start", decoded.frame_start},
                          {"estimation_residual", decoded.channel.residual_norm}};
        report["reference_ber"] = count_bit_errors(reference, decoded.payload_bits).rate();
    } catch (const Error& e) {
        report.update(error_json(e));
        write_json(out / "report.json", report);
        return exit_code_for(e.kind());
    }
    write_json(out / "report.json", report);
    return kExitOk;
}

int cmd_offset_demo(const RunConfig& cfg, const fs::path& out) {
    cfg.validate();
    ensure_dir(out);
    const LinkConfig link = cfg.link_config();
    std::string csv = "offset_fraction,analytic_main,analytic_next,empirical_main,empirical_next,max_abs_diff\n";
    for (double f : cfg.demo_offsets) {
        const TimingOffset offset = TimingOffset::from_fraction(f, cfg.symbol_duration);
        const auto [a_main, a_next] = analytic_offset_taps(offset.delta, cfg.symbol_duration);
        const auto [e_main, e_next] = empirical_offset_taps(link, offset);
        const double diff = std::max(std::abs(a_main - e_main), std::abs(a_next - e_next));
        csv += format_double(f) + "," + format_double(a_main) + "," + format_double(a_next) + "," +
               format_double(e_main) + "," + format_double(e_next) + "," + format_double(diff) + "\n";
    }
    write_text(out / "taps.csv", csv);
    return kExitOk;
}

} // namespace occ::app
