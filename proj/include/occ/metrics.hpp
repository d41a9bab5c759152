#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace occ {

/// Exact error tally; merging tallies is plain addition.
struct ErrorCount {
    std::size_t errors = 0;
    std::size_t total = 0;

    double rate() const noexcept {
        return total == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(total);
    }
    ErrorCount& operator+=(const ErrorCount& o) noexcept {
        errors += o.errors;
        total += o.total;
        return *this;
    }
};

struct LinkReport {
    ErrorCount bits;
    ErrorCount symbols;
    std::optional<double> snr_db;
    double offset_fraction = 0.0;
    double residual_isi = 0.0;
    std::vector<double> estimated_taps;

    double ber() const noexcept { return bits.rate(); }
    double ser() const noexcept { return symbols.rate(); }
};

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;

    std::size_t total() const noexcept;
};

/// Indices where tx and rx differ. Throws Error(Shape) on length mismatch.
std::vector<std::size_t> error_positions(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);
std::vector<std::size_t> error_positions(std::span<const double> tx, std::span<const double> rx);

ErrorCount count_bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);
ErrorCount count_symbol_errors(std::span<const double> tx, std::span<const double> rx);

/// Hamming distance / length.
double bit_error_rate(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

/// max - min; 0 for an empty sequence.
double peak_to_peak(std::span<const double> samples);

/// n_bins uniform bins over [range.first, range.second]; samples outside the
/// range (and NaN, into the low bin) land in the edge bins.
Histogram histogram(std::span<const double> samples, std::size_t n_bins, std::pair<double, double> range);

inline constexpr double kDefaultMinProminence = 0.05;

/// Number of local maxima (plateaus counted once) whose prominence reaches
/// min_prominence * max(counts). Prominence is the peak height minus the
/// higher of the two lowest points reached before a taller bin (or the
/// histogram edge, beyond which counts are 0) on each side.
std::size_t detect_clusters(const Histogram& h, double min_prominence = kDefaultMinProminence);

} // namespace occ
