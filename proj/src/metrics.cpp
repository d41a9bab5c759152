#include "occ/metrics.hpp"

#include "occ/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace occ {

std::size_t Histogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

namespace {

template <typename T>
std::vector<std::size_t> positions(std::span<const T> tx, std::span<const T> rx) {
    if (tx.size() != rx.size()) {
        throw Error(ErrorKind::Shape, "error count: length mismatch (" + std::to_string(tx.size()) + " vs " +
                                          std::to_string(rx.size()) + ")");
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tx.size(); ++i)
        if (tx[i] != rx[i]) out.push_back(i);
    return out;
}

} // namespace

std::vector<std::size_t> error_positions(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    return positions(tx, rx);
}

std::vector<std::size_t> error_positions(std::span<const double> tx, std::span<const double> rx) {
    return positions(tx, rx);
}

ErrorCount count_bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    return {error_positions(tx, rx).size(), tx.size()};
}

ErrorCount count_symbol_errors(std::span<const double> tx, std::span<const double> rx) {
    return {error_positions(tx, rx).size(), tx.size()};
}

double bit_error_rate(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    return count_bit_errors(tx, rx).rate();
}

double peak_to_peak(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    return *hi - *lo;
}

Histogram histogram(std::span<const double> samples, std::size_t n_bins, std::pair<double, double> range) {
    const auto [lo, hi] = range;
    if (n_bins == 0) throw Error(ErrorKind::Config, "histogram: n_bins must be >= 1");
    if (!(lo < hi)) throw Error(ErrorKind::Config, "histogram: range must satisfy low < high");
    Histogram h;
    const double width = (hi - lo) / static_cast<double>(n_bins);
    h.bin_edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
    h.bin_edges.back() = hi;
    h.counts.assign(n_bins, 0);
    const double top = static_cast<double>(n_bins - 1);
    for (double x : samples) {
        double pos = std::floor((x - lo) / width);
        if (std::isnan(pos)) pos = 0.0;
        pos = std::clamp(pos, 0.0, top);
        ++h.counts[static_cast<std::size_t>(pos)];
    }
    return h;
}

std::size_t detect_clusters(const Histogram& h, double min_prominence) {
    if (!(min_prominence > 0.0)) throw Error(ErrorKind::Config, "detect_clusters: min_prominence must be > 0");
    const auto& c = h.counts;
    if (c.empty()) return 0;
    const std::size_t peak_max = *std::max_element(c.begin(), c.end());
    if (peak_max == 0) return 0;
    const double needed = min_prominence * static_cast<double>(peak_max);
    const std::size_t n = c.size();

    std::size_t found = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && c[j + 1] == c[i]) ++j; // plateau [i, j]
        const std::size_t height = c[i];
        const std::size_t left_neighbor = i == 0 ? 0 : c[i - 1];
        const std::size_t right_neighbor = j + 1 == n ? 0 : c[j + 1];
        if (height > left_neighbor && height > right_neighbor) {
            std::size_t left_base = height;
            std::size_t k = i;
            while (true) {
                if (k == 0) {
                    left_base = 0;
                    break;
                }
                --k;
                if (c[k] > height) break;
                left_base = std::min(left_base, c[k]);
            }
            std::size_t right_base = height;
            k = j;
            while (true) {
                if (k + 1 == n) {
                    right_base = 0;
                    break;
                }
                ++k;
                if (c[k] > height) break;
                right_base = std::min(right_base, c[k]);
            }
            const double prominence = static_cast<double>(height - std::max(left_base, right_base));
            if (prominence >= needed) ++found;
        }
        i = j + 1;
    }
    return found;
}

} // namespace occ
