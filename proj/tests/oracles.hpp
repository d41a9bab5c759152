#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's DSP code paths.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace occ::oracle {

/// Integral of a piecewise-constant symbol train (symbol n = levels[n] on
/// [n T_s, (n+1) T_s), zero outside) over [t_lo, t_hi], by midpoint rule on
/// `points` subintervals.
inline double integrate_symbols(const std::vector<double>& levels, double symbol_duration, double t_lo, double t_hi,
                                std::size_t points = 200000) {
    const double h = (t_hi - t_lo) / static_cast<double>(points);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = t_lo + (static_cast<double>(i) + 0.5) * h;
        const double pos = std::floor(t / symbol_duration);
        if (pos < 0 || pos >= static_cast<double>(levels.size())) continue;
        acc += levels[static_cast<std::size_t>(pos)];
    }
    return static_cast<double>(acc * h);
}

/// Fraction of a T_s-wide window starting at delta that overlaps symbol 0
/// ([0, T_s)) and symbol 1 ([T_s, 2 T_s)), by fine-grid integration of
/// indicator functions.
inline std::pair<double, double> overlap_taps(double delta_fraction, std::size_t points = 1000000) {
    const double first = integrate_symbols({1.0, 0.0}, 1.0, delta_fraction, delta_fraction + 1.0, points);
    const double second = integrate_symbols({0.0, 1.0}, 1.0, delta_fraction, delta_fraction + 1.0, points);
    return {first, second};
}

/// Least squares through the normal equations A^T A x = A^T b, accumulated
/// and solved (Gaussian elimination with partial pivoting) in long double.
inline std::vector<double> normal_equations_ls(const std::vector<std::vector<double>>& a,
                                               const std::vector<double>& b) {
    const std::size_t m = a.size();
    const std::size_t n = a.front().size();
    std::vector<std::vector<long double>> g(n, std::vector<long double>(n + 1, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            long double s = 0.0L;
            for (std::size_t r = 0; r < m; ++r) s += static_cast<long double>(a[r][i]) * a[r][j];
            g[i][j] = s;
        }
        long double s = 0.0L;
        for (std::size_t r = 0; r < m; ++r) s += static_cast<long double>(a[r][i]) * b[r];
        g[i][n] = s;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(g[r][c]) > std::fabs(g[piv][c])) piv = r;
        std::swap(g[c], g[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const long double f = g[r][c] / g[c][c];
            for (std::size_t k = c; k <= n; ++k) g[r][k] -= f * g[c][k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(g[i][n] / g[i][i]);
    return x;
}

/// First n coefficients of 1 / h(z) by polynomial long division (h[0] != 0).
inline std::vector<double> series_inverse(const std::vector<double>& h, std::size_t n) {
    std::vector<double> g(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = k == 0 ? 1.0 : 0.0;
        for (std::size_t j = 1; j < h.size() && j <= k; ++j) acc -= h[j] * g[k - j];
        g[k] = acc / h[0];
    }
    return g;
}

/// Direct double-loop linear convolution.
inline std::vector<double> direct_convolution(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

} // namespace occ::oracle
