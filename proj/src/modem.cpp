#include "occ/modem.hpp"

#include "occ/error.hpp"
#include "occ/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace occ {

PamAlphabet::PamAlphabet(unsigned order) : order_(order), bits_(0) {
    if (order < 2 || order > (1u << 16) || (order & (order - 1)) != 0) {
        throw Error(ErrorKind::Config,
                    "modulation order must be a power of two in [2, 65536], got " + std::to_string(order));
    }
    while ((1u << bits_) < order) ++bits_;
    levels_.resize(order);
    const double denom = static_cast<double>(order - 1);
    for (unsigned i = 0; i < order; ++i) {
        levels_[i] = (2.0 * i - denom) / denom;
    }
}

unsigned PamAlphabet::index_of_word(unsigned w) const noexcept {
    unsigned i = w;
    for (unsigned shift = 1; shift < bits_; shift <<= 1) i ^= i >> shift;
    return i;
}

unsigned PamAlphabet::index_of_symbol(double symbol) const {
    const double u = (symbol + 1.0) * static_cast<double>(order_ - 1) / 2.0;
    const double r = std::round(u);
    if (!(r >= 0.0 && r <= static_cast<double>(order_ - 1)) ||
        std::abs(levels_[static_cast<unsigned>(r)] - symbol) > 1e-9) {
        throw Error(ErrorKind::Domain, "symbol " + std::to_string(symbol) + " is not a " +
                                           std::to_string(order_) + "-PAM level");
    }
    return static_cast<unsigned>(r);
}

Symbols Frame::symbols() const {
    Symbols all;
    all.reserve(size());
    all.insert(all.end(), preamble.begin(), preamble.end());
    all.insert(all.end(), payload.begin(), payload.end());
    return all;
}

void TxConfig::validate() const {
    if (!(symbol_duration > 0.0)) throw Error(ErrorKind::Config, "symbol_duration must be > 0");
    if (!(max_intensity > 0.0)) throw Error(ErrorKind::Config, "max_intensity must be > 0");
    if (oversampling < 2) throw Error(ErrorKind::Config, "oversampling must be >= 2");
}

Symbols map_bits(std::span<const std::uint8_t> bits, const PamAlphabet& alphabet) {
    const unsigned b = alphabet.bits_per_symbol();
    if (bits.size() % b != 0) {
        throw Error(ErrorKind::Shape, "map_bits: " + std::to_string(bits.size()) +
                                          " bits is not a multiple of " + std::to_string(b));
    }
    Symbols out;
    out.reserve(bits.size() / b);
    for (std::size_t pos = 0; pos < bits.size(); pos += b) {
        unsigned word = 0;
        for (unsigned k = 0; k < b; ++k) {
            const auto bit = bits[pos + k];
            if (bit > 1) throw Error(ErrorKind::Domain, "map_bits: bit value must be 0 or 1");
            word = (word << 1) | bit;
        }
        out.push_back(alphabet.levels()[alphabet.index_of_word(word)]);
    }
    return out;
}

Bits symbols_to_bits(std::span<const double> symbols, const PamAlphabet& alphabet) {
    const unsigned b = alphabet.bits_per_symbol();
    Bits out;
    out.reserve(symbols.size() * b);
    for (double s : symbols) {
        const unsigned word = alphabet.word_of_index(alphabet.index_of_symbol(s));
        for (unsigned k = b; k-- > 0;) out.push_back(static_cast<std::uint8_t>((word >> k) & 1u));
    }
    return out;
}

Symbols default_preamble(std::size_t length) {
    if (length == 0) throw Error(ErrorKind::Config, "preamble length must be >= 1");
    constexpr std::size_t kPeriod = 31;
    std::uint8_t s[kPeriod];
    for (std::size_t k = 0; k < 5; ++k) s[k] = 1;
    for (std::size_t k = 0; k + 5 < kPeriod; ++k) s[k + 5] = s[k + 2] ^ s[k];
    Symbols out(length);
    for (std::size_t k = 0; k < length; ++k) out[k] = s[k % kPeriod] ? 1.0 : -1.0;
    return out;
}

Frame build_frame(Symbols preamble, std::span<const std::uint8_t> payload_bits, const PamAlphabet& alphabet) {
    if (preamble.empty()) throw Error(ErrorKind::Config, "build_frame: preamble is empty");
    for (double p : preamble) {
        if (p != 1.0 && p != -1.0) {
            throw Error(ErrorKind::Config, "build_frame: preamble symbols must be -1 or +1");
        }
    }
    return Frame{std::move(preamble), map_bits(payload_bits, alphabet), alphabet};
}

Waveform shape_symbols(std::span<const double> symbols, const TxConfig& cfg) {
    cfg.validate();
    const double i0 = cfg.nominal_intensity();
    Waveform w;
    w.dt = cfg.grid_step();
    w.samples.reserve(symbols.size() * cfg.oversampling);
    for (double a : symbols) {
        const double v = i0 * (1.0 + a);
        w.samples.insert(w.samples.end(), cfg.oversampling, v);
    }
    return w;
}

Waveform shape_waveform(const Frame& frame, const TxConfig& cfg) {
    const Symbols all = frame.symbols();
    return shape_symbols(all, cfg);
}

Symbols slice(std::span<const double> samples, const PamAlphabet& alphabet, std::uint64_t rng_seed) {
    CounterRng coin(rng_seed);
    const unsigned top = alphabet.order() - 1;
    const double half_spacing_units = static_cast<double>(top) / 2.0;
    constexpr double kTieTolerance = 1e-12;
    Symbols out;
    out.reserve(samples.size());
    for (double x : samples) {
        double u = std::isnan(x) ? half_spacing_units : (x + 1.0) * half_spacing_units;
        u = std::clamp(u, 0.0, static_cast<double>(top));
        const double lo = std::floor(u);
        unsigned idx;
        if (lo < top && std::abs((u - lo) - 0.5) <= kTieTolerance * half_spacing_units) {
            idx = static_cast<unsigned>(lo) + (coin.next_bit() ? 1u : 0u);
        } else {
            idx = static_cast<unsigned>(std::round(u));
        }
        out.push_back(alphabet.levels()[idx]);
    }
    return out;
}

} // namespace occ
