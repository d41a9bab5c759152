#include "occ/numerics.hpp"

#include "occ/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace occ {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorKind::Shape, "DenseMatrix: data length " + std::to_string(data_.size()) +
                                          " != " + std::to_string(rows_) + "x" +
                                          std::to_string(cols_));
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> DenseMatrix::apply(std::span<const double> x) const {
    if (x.size() != cols_) throw Error(ErrorKind::Shape, "DenseMatrix::apply: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        const double* row_ptr = data_.data() + r * cols_;
        for (std::size_t c = 0; c < cols_; ++c) acc += row_ptr[c] * x[c];
        y[r] = acc;
    }
    return y;
}

std::vector<double> DenseMatrix::apply_transpose(std::span<const double> x) const {
    if (x.size() != rows_) throw Error(ErrorKind::Shape, "DenseMatrix::apply_transpose: size mismatch");
    std::vector<double> y(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        const double* row_ptr = data_.data() + r * cols_;
        for (std::size_t c = 0; c < cols_; ++c) y[c] += row_ptr[c] * x[r];
    }
    return y;
}

double DenseMatrix::norm_inf() const {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (double v : row(r)) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::Shape, "convolve: empty operand");
    const std::size_t n_out = a.size() + b.size() - 1;
    std::vector<double> out(n_out, 0.0);
    for (std::size_t n = 0; n < n_out; ++n) {
        const std::size_t j_lo = n >= a.size() ? n - a.size() + 1 : 0;
        const std::size_t j_hi = std::min(n, b.size() - 1);
        double acc = 0.0;
        for (std::size_t j = j_lo; j <= j_hi; ++j) acc += a[n - j] * b[j];
        out[n] = acc;
    }
    return out;
}

DenseMatrix convolution_matrix(std::span<const double> seq, std::size_t n_cols, ConvolutionMode mode) {
    if (seq.empty() || n_cols == 0) {
        throw Error(ErrorKind::Shape, "convolution_matrix: empty sequence or zero columns");
    }
    if (mode == ConvolutionMode::Valid && seq.size() < n_cols) {
        throw Error(ErrorKind::Shape, "convolution_matrix: valid mode needs |seq| >= n_cols (" +
                                          std::to_string(seq.size()) + " < " +
                                          std::to_string(n_cols) + ")");
    }
    const std::size_t offset = mode == ConvolutionMode::Valid ? n_cols - 1 : 0;
    const std::size_t n_rows =
        mode == ConvolutionMode::Valid ? seq.size() - n_cols + 1 : seq.size() + n_cols - 1;
    DenseMatrix m(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            const std::size_t k = i + offset;
            if (k >= j && k - j < seq.size()) m(i, j) = seq[k - j];
        }
    }
    return m;
}

std::vector<double> solve_least_squares(const DenseMatrix& a, std::span<const double> b) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n == 0 || m < n) {
        throw Error(ErrorKind::Shape, "solve_least_squares: need rows >= cols >= 1, got " +
                                          std::to_string(m) + "x" + std::to_string(n));
    }
    if (b.size() != m) throw Error(ErrorKind::Shape, "solve_least_squares: rhs length mismatch");

    // Work in column-major copies; R overwrites the upper triangle.
    std::vector<double> r(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) r[j * m + i] = a(i, j);
    std::vector<double> qtb(b.begin(), b.end());
    std::vector<double> diag(n);

    for (std::size_t k = 0; k < n; ++k) {
        double* col = r.data() + k * m;
        double scale = 0.0;
        for (std::size_t i = k; i < m; ++i) scale = std::max(scale, std::abs(col[i]));
        if (scale == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        double sigma = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            const double v = col[i] / scale;
            sigma += v * v;
        }
        double alpha = scale * std::sqrt(sigma);
        if (col[k] > 0.0) alpha = -alpha;
        // v = x - alpha e_1, stored in col[k..m)
        col[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) vnorm2 += col[i] * col[i];
        diag[k] = alpha;
        if (vnorm2 == 0.0) continue;

        for (std::size_t j = k + 1; j < n; ++j) {
            double* cj = r.data() + j * m;
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += col[i] * cj[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) cj[i] -= f * col[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += col[i] * qtb[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) qtb[i] -= f * col[i];
    }

    double largest = 0.0;
    for (double d : diag) largest = std::max(largest, std::abs(d));
    for (double d : diag) {
        if (!(std::abs(d) > 1e-12 * largest) || largest == 0.0) {
            throw Error(ErrorKind::DesignSingular, "solve_least_squares: matrix is numerically rank deficient");
        }
    }

    std::vector<double> x(n);
    for (std::size_t kk = n; kk-- > 0;) {
        double acc = qtb[kk];
        for (std::size_t j = kk + 1; j < n; ++j) acc -= r[j * m + kk] * x[j];
        x[kk] = acc / diag[kk];
    }
    return x;
}

double norm2(std::span<const double> v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) {
        const double t = x / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
} // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master ^ mix64(index));
}

CounterRng::CounterRng(std::uint64_t seed) noexcept : seed_(seed), key_(mix64(seed)) {}

std::uint64_t CounterRng::next_u64() noexcept {
    return mix64(key_ + (counter_++) * kGolden);
}

double CounterRng::next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededGaussian::next() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - rng_.next_uniform(); // (0, 1]
    const double u2 = rng_.next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<double> gaussian_stream(SeededGaussian& gen, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = gen.next();
    return out;
}

} // namespace occ
