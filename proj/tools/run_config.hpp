#pragma once

#include "occ/link.hpp"
#include "occ/modem.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace occ::app {

inline constexpr int kSchemaVersion = 1;

/// Offset as a fraction of T_s, or nullopt for a uniform draw per image.
using OffsetSpec = std::optional<double>;

struct SweepSpec {
    std::vector<OffsetSpec> offsets{0.0};
    std::vector<std::optional<double>> snr_db{std::nullopt}; // nullopt = noiseless
    std::size_t trials = 1;
    unsigned threads = 1;
};

/// Experiment description shared by every subcommand. Loaded from JSON;
/// all fields have defaults and unknown fields are rejected.
struct RunConfig {
    unsigned modulation_order = 2;
    std::size_t preamble_length = 31;
    std::optional<Symbols> preamble;
    std::size_t payload_bits = 1000;
    std::optional<Bits> payload;
    double symbol_duration = 8e-6;
    unsigned oversampling = 64;
    double max_intensity = 1.0;
    std::optional<double> led_cutoff_hz;
    double channel_gain = 1.0;
    std::optional<double> snr_db;
    OffsetSpec offset_fraction = 0.0;
    std::optional<double> exposure_time; // defaults to symbol_duration
    double sensor_gain = 1.0;
    std::optional<std::size_t> rows;     // nullopt = fit the frame
    std::size_t cols = 64;
    unsigned bit_depth = 8;
    std::size_t lead_idle_symbols = 8;
    std::size_t channel_memory = 2;
    std::size_t equalizer_taps = 31;
    std::optional<std::size_t> delay;    // nullopt = auto
    double sync_threshold = kDefaultSyncThreshold;
    std::uint64_t master_seed = 1;
    std::optional<std::pair<std::size_t, std::size_t>> roi_cols;
    SweepSpec sweep;
    std::vector<double> demo_offsets{0.0, 0.1, 0.25, 0.4, 0.5};

    PamAlphabet alphabet() const { return PamAlphabet(modulation_order); }
    Symbols preamble_symbols() const;
    std::size_t payload_bit_count() const;
    std::size_t payload_symbol_count() const;
    /// Explicit payload, or random bits from `seed`.
    Bits payload_for(std::uint64_t seed) const;
    double exposure() const { return exposure_time.value_or(symbol_duration); }
    std::size_t resolved_rows() const;
    LinkConfig link_config() const;

    /// Checks every field and cross-field constraint; throws Error(Config)
    /// naming the offending field.
    void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
/// Fully resolved config (defaults filled in, rows resolved).
nlohmann::json to_json(const RunConfig& cfg);

/// Reads a JSON config file; throws Error(Io) / Error(Config).
nlohmann::json read_config_json(const std::filesystem::path& path);

/// Applies "dotted.key=value" to a config tree. The value is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(nlohmann::json& tree, const std::string& assignment);

} // namespace occ::app
