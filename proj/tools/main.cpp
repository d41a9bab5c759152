// occ: rolling-shutter camera link simulator and decoder.

#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace occ::app;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> offset;
    std::optional<double> snr;
    std::optional<unsigned> order;
    std::optional<std::size_t> payload_bits;
    std::optional<unsigned> threads;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", flags.seed, "Master seed (u64)");
    cmd->add_option("--offset", flags.offset, "Timing offset as a fraction of T_s");
    cmd->add_option("--snr", flags.snr, "SNR per symbol in dB");
    cmd->add_option("--order", flags.order, "PAM order M");
    cmd->add_option("--payload-bits", flags.payload_bits, "Payload length in bits");
    cmd->add_option("--threads", flags.threads, "Worker threads for sweeps");
    cmd->add_option("--set", flags.overrides, "Override a config field: key.path=value (repeatable)");
}

RunConfig resolve(const CommonFlags& flags) {
    nlohmann::json tree = flags.config_path.empty() ? nlohmann::json::object() : read_config_json(flags.config_path);
    for (const auto& o : flags.overrides) apply_override(tree, o);
    if (flags.seed) tree["master_seed"] = *flags.seed;
    if (flags.offset) tree["offset_fraction"] = *flags.offset;
    if (flags.snr) tree["snr_db"] = *flags.snr;
    if (flags.order) tree["modulation_order"] = *flags.order;
    if (flags.payload_bits) tree["payload_bits"] = *flags.payload_bits;
    if (flags.threads) tree["sweep"]["threads"] = *flags.threads;
    return parse_config(tree);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rolling-shutter optical camera communication link toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    bool waveform = false;
    std::string image;

    auto* simulate = app.add_subcommand("simulate", "Simulate one capture and decode it");
    add_common(simulate, flags);
    simulate->add_flag("--waveform", waveform, "Also write waveform.csv (t, x, r)");

    auto* sweep = app.add_subcommand("sweep-ber", "Monte-Carlo BER over offsets and SNRs");
    add_common(sweep, flags);

    auto* decode = app.add_subcommand("decode-image", "Decode a captured PGM stripe image");
    add_common(decode, flags);
    decode->add_option("image", image, "PGM (P5) image")->required();

    auto* demo = app.add_subcommand("offset-demo", "Analytic vs simulated offset taps");
    add_common(demo, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        const RunConfig cfg = resolve(flags);
        int code = kExitOk;
        if (simulate->parsed()) code = cmd_simulate(cfg, flags.out_dir, {waveform});
        else if (sweep->parsed()) code = cmd_sweep_ber(cfg, flags.out_dir);
        else if (decode->parsed()) code = cmd_decode_image(image, cfg, flags.out_dir);
        else if (demo->parsed()) code = cmd_offset_demo(cfg, flags.out_dir);
        if (code != kExitOk) std::cerr << "error: see " << flags.out_dir << "/report.json (exit " << code << ")\n";
        return code;
    } catch (const occ::Error& e) {
        std::cerr << "error [" << occ::to_string(e.kind()) << "]: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
