#pragma once

#include "run_config.hpp"

#include "occ/error.hpp"

#include <filesystem>
#include <string>

namespace occ::app {

/// Process exit codes. Each error kind has its own code.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitIo = 3,
    kExitSyncFailure = 4,
    kExitUnusableCapture = 5,
    kExitEstimationSingular = 6,
    kExitDesignSingular = 7,
    kExitShape = 8,
    kExitDomain = 9,
};

int exit_code_for(ErrorKind kind);

/// Shortest round-trip decimal text, '.' separator, independent of locale.
std::string format_double(double v);

struct SimulateOptions {
    bool write_waveform = false; // also emit waveform.csv (t, x, r)
};

/// Writes samples.csv, report.json and capture.pgm to `out`. Stage errors
/// after the capture are recorded in report.json and returned as an exit code.
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, const SimulateOptions& opts = {});

/// Writes sweep.csv: one row per (offset, snr) aggregated over trials.
int cmd_sweep_ber(const RunConfig& cfg, const std::filesystem::path& out);

/// Writes decoded.bits and report.json; failures are recorded in
/// report.json with a machine-readable reason.
int cmd_decode_image(const std::filesystem::path& image, const RunConfig& cfg, const std::filesystem::path& out);

/// Writes taps.csv with analytic and simulated (h_main, h_next) per offset.
int cmd_offset_demo(const RunConfig& cfg, const std::filesystem::path& out);

} // namespace occ::app
