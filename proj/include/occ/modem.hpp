#pragma once

#include "occ/waveform.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace occ {

using Bits = std::vector<std::uint8_t>;
using Symbols = std::vector<double>;

/// Normalized M-PAM alphabet: levels {+-1, +-3, ..., +-(M-1)} / (M-1),
/// ascending.
///
/// Bit mapping is Gray coded over the ascending level order: level index i
/// carries the b-bit word i ^ (i >> 1), most significant bit first. For M = 4:
///
///     index  level  bits
///       0    -1     00
///       1    -1/3   01
///       2    +1/3   11
///       3    +1     10
class PamAlphabet {
public:
    /// Throws Error(Config) unless order is a power of two >= 2 (and <= 2^16).
    explicit PamAlphabet(unsigned order);

    unsigned order() const noexcept { return order_; }
    unsigned bits_per_symbol() const noexcept { return bits_; }
    std::span<const double> levels() const noexcept { return levels_; }
    double spacing() const noexcept { return 2.0 / static_cast<double>(order_ - 1); }

    /// Gray word carried by level index `i`.
    unsigned word_of_index(unsigned i) const noexcept { return i ^ (i >> 1); }
    /// Level index carrying Gray word `w`.
    unsigned index_of_word(unsigned w) const noexcept;
    /// Level index of `symbol`; throws Error(Domain) if it is not a level
    /// (1e-9 tolerance).
    unsigned index_of_symbol(double symbol) const;

private:
    unsigned order_;
    unsigned bits_;
    std::vector<double> levels_;
};

struct Frame {
    Symbols preamble;
    Symbols payload;
    PamAlphabet alphabet;

    std::size_t size() const noexcept { return preamble.size() + payload.size(); }
    /// [preamble, payload]
    Symbols symbols() const;
};

struct TxConfig {
    double symbol_duration = 8e-6; // T_s [s]
    double max_intensity = 1.0;    // I_max
    unsigned oversampling = 64;    // grid samples per symbol

    double nominal_intensity() const noexcept { return 0.5 * max_intensity; }
    double grid_step() const noexcept { return symbol_duration / oversampling; }
    /// Throws Error(Config) on T_s <= 0, I_max <= 0 or oversampling < 2.
    void validate() const;
};

Symbols map_bits(std::span<const std::uint8_t> bits, const PamAlphabet& alphabet);
Bits symbols_to_bits(std::span<const double> symbols, const PamAlphabet& alphabet);

/// Length-n binary +-1 preamble. The default (n = 31) is the full period of
/// the maximal-length sequence s[k+5] = s[k+2] xor s[k] (x^5 + x^2 + 1),
/// started from s[0..4] = 1 and mapped 0 -> -1, 1 -> +1. Other lengths
/// repeat or truncate that period.
Symbols default_preamble(std::size_t length = 31);

Frame build_frame(Symbols preamble, std::span<const std::uint8_t> payload_bits,
                  const PamAlphabet& alphabet);

/// Piecewise-constant DC-biased intensity: each symbol a_n fills
/// `oversampling` grid samples with I_0 * (1 + a_n).
Waveform shape_waveform(const Frame& frame, const TxConfig& cfg);
/// Same, for a bare symbol sequence (levels in [-1, 1]; 0 is the idle
/// bias-only level).
Waveform shape_symbols(std::span<const double> symbols, const TxConfig& cfg);

/// Nearest-level decision. Samples exactly between two levels (within 1e-12
/// of the midpoint, in normalized units) take either neighbor with
/// probability 1/2, drawn from a CounterRng seeded with `rng_seed`.
Symbols slice(std::span<const double> samples, const PamAlphabet& alphabet, std::uint64_t rng_seed);

} // namespace occ
