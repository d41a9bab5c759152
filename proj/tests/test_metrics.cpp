#include <doctest.h>

#include "occ/error.hpp"
#include "occ/metrics.hpp"
#include "occ/modem.hpp"
#include "occ/numerics.hpp"

#include <cmath>
#include <limits>

using namespace occ;

namespace {

std::size_t occupied(const Histogram& h) {
    std::size_t n = 0;
    for (auto c : h.counts) n += c > 0 ? 1 : 0;
    return n;
}

Histogram from_counts(std::vector<std::size_t> counts) {
    Histogram h;
    h.counts = std::move(counts);
    for (std::size_t i = 0; i <= h.counts.size(); ++i) h.bin_edges.push_back(static_cast<double>(i));
    return h;
}

} // namespace

TEST_CASE("bit_error_rate") {
    const Bits a{0, 1, 1, 0, 1, 0, 0, 1};
    Bits b = a;
    CHECK(bit_error_rate(a, b) == 0.0);
    for (auto& v : b) v ^= 1;
    CHECK(bit_error_rate(a, b) == 1.0);
    b = a;
    b[2] ^= 1;
    b[7] ^= 1;
    CHECK(bit_error_rate(a, b) == 0.25);
    CHECK(error_positions(a, b) == std::vector<std::size_t>{2, 7});
    CHECK_THROWS_AS(bit_error_rate(a, Bits{0, 1}), Error);
    CHECK_THROWS_AS(error_positions(std::vector<double>{1.0}, std::vector<double>{}), Error);
}

TEST_CASE("error counts are consistent with stored positions") {
    CounterRng rng(6);
    const PamAlphabet pam4(4);
    Bits tx(2000), rx;
    for (auto& v : tx) v = rng.next_bit();
    const auto sym_tx = map_bits(tx, pam4);
    auto sym_rx = sym_tx;
    for (auto& s : sym_rx)
        if (rng.next_uniform() < 0.1) s = pam4.levels()[rng.next_u64() % 4];
    rx = symbols_to_bits(sym_rx, pam4);

    const auto bits = count_bit_errors(tx, rx);
    const auto syms = count_symbol_errors(sym_tx, sym_rx);
    CHECK(bits.errors == error_positions(tx, rx).size());
    CHECK(syms.errors == error_positions(sym_tx, sym_rx).size());
    CHECK(bits.rate() == static_cast<double>(error_positions(tx, rx).size()) / 2000.0);
    CHECK(bits.rate() == bit_error_rate(tx, rx));
    CHECK(bits.errors <= syms.errors * pam4.bits_per_symbol());
    // Gray mapping: neighbouring-level errors cost one bit.
    CHECK(bits.errors >= syms.errors);

    LinkReport r;
    r.bits = bits;
    r.symbols = syms;
    CHECK(r.ber() <= r.ser() * pam4.bits_per_symbol());

    ErrorCount merged;
    merged += ErrorCount{3, 10};
    merged += ErrorCount{1, 30};
    CHECK(merged.errors == 4);
    CHECK(merged.total == 40);
    CHECK(merged.rate() == 0.1);
    CHECK(ErrorCount{}.rate() == 0.0);
}

TEST_CASE("histogram basics") {
    const auto h = histogram(std::vector<double>{0.0}, 10, {-1.0, 1.0});
    CHECK(h.bin_edges.size() == 11);
    CHECK(h.counts.size() == 10);
    CHECK(occupied(h) == 1);
    CHECK(h.total() == 1);
    CHECK(h.bin_edges.front() == -1.0);
    CHECK(h.bin_edges.back() == 1.0);

    // Out-of-range and NaN samples saturate into the edge bins.
    const auto e = histogram(std::vector<double>{-5.0, 5.0, 1.0, -1.0, std::numeric_limits<double>::quiet_NaN(),
                                                 std::numeric_limits<double>::infinity()},
                             4, {-1.0, 1.0});
    CHECK(e.counts == std::vector<std::size_t>{3, 0, 0, 3});

    CHECK_THROWS_AS(histogram(std::vector<double>{0.0}, 0, {0.0, 1.0}), Error);
    CHECK_THROWS_AS(histogram(std::vector<double>{0.0}, 4, {1.0, 1.0}), Error);
}

TEST_CASE("histogram conserves counts") {
    CounterRng rng(90);
    for (std::size_t n : {0u, 1u, 17u, 1000u}) {
        std::vector<double> s(n);
        for (auto& v : s) v = rng.next_uniform() * 6 - 3;
        for (std::size_t bins : {1u, 7u, 64u}) CHECK(histogram(s, bins, {-2.0, 2.0}).total() == n);
    }
}

TEST_CASE("quarter-offset samples give four clusters, equalized samples two") {
    CounterRng rng(1);
    std::vector<double> a(5000);
    for (auto& v : a) v = rng.next_bit() ? 1.0 : -1.0;
    std::vector<double> pre;
    for (std::size_t n = 0; n + 1 < a.size(); ++n) pre.push_back(0.75 * a[n] + 0.25 * a[n + 1]);
    const auto hp = histogram(pre, 60, {-1.5, 1.5});
    CHECK(occupied(hp) == 4);
    CHECK(detect_clusters(hp) == 4);

    std::vector<double> post;
    for (double v : a) post.push_back(v + (rng.next_uniform() - 0.5) * 0.08);
    const auto hq = histogram(post, 60, {-1.5, 1.5});
    CHECK(detect_clusters(hq) == 2);
    for (std::size_t b = 0; b < hq.counts.size(); ++b) {
        if (hq.counts[b] == 0) continue;
        const double center = 0.5 * (hq.bin_edges[b] + hq.bin_edges[b + 1]);
        CHECK(std::abs(std::abs(center) - 1.0) <= 0.1);
    }
}

TEST_CASE("detect_clusters") {
    CHECK(detect_clusters(from_counts({0, 1, 4, 9, 4, 1, 0})) == 1);
    CHECK(detect_clusters(from_counts({5, 0, 0, 5})) == 2);
    // Plateau counts once.
    CHECK(detect_clusters(from_counts({0, 7, 7, 7, 0})) == 1);
    // Edge peaks are measured against an outside of zero.
    CHECK(detect_clusters(from_counts({9, 3, 1})) == 1);
    // Small wiggles below 5 % of the maximum are ignored.
    CHECK(detect_clusters(from_counts({0, 100, 50, 53, 50, 0})) == 1);
    CHECK(detect_clusters(from_counts({0, 100, 40, 53, 40, 0})) == 2);
    CHECK(detect_clusters(from_counts({0, 0, 0})) == 0);
    CHECK(detect_clusters(from_counts({})) == 0);
    CHECK_THROWS_AS(detect_clusters(from_counts({1}), 0.0), Error);
}

TEST_CASE("detect_clusters is invariant to scaling the counts") {
    CounterRng rng(15);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::size_t> c(20);
        for (auto& v : c) v = rng.next_u64() % 30;
        auto scaled = c;
        for (auto& v : scaled) v *= 7;
        CHECK(detect_clusters(from_counts(c)) == detect_clusters(from_counts(scaled)));
    }
}

TEST_CASE("peak_to_peak") {
    CHECK(peak_to_peak(std::vector<double>{}) == 0.0);
    CHECK(peak_to_peak(std::vector<double>{-0.5, 1.5, 0.2}) == 2.0);
}
