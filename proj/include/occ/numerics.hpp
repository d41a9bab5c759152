#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace occ {

/// Row-major dense real matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    /// y = M x, each entry summed left to right over the columns.
    std::vector<double> apply(std::span<const double> x) const;
    /// y = M^T x.
    std::vector<double> apply_transpose(std::span<const double> x) const;

    /// Largest absolute row sum (infinity norm).
    double norm_inf() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Full linear convolution, length |a| + |b| - 1.
///
/// out[n] = sum_j a[n - j] * b[j], accumulated from 0.0 in ascending j.
/// The fixed order makes convolve() and convolution_matrix(a, ...).apply(b)
/// bit-identical.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

enum class ConvolutionMode {
    /// (|seq| + n_cols - 1) x n_cols; every output of the full convolution.
    Full,
    /// (|seq| - n_cols + 1) x n_cols; only outputs where the kernel fully
    /// overlaps seq. Row i is [seq[i + n_cols - 1], ..., seq[i]].
    Valid,
};

/// Toeplitz matrix T with T(i, j) = seq[i + offset - j], where offset is 0
/// for Full and n_cols - 1 for Valid, so T x is the matching slice of
/// convolve(seq, x).
DenseMatrix convolution_matrix(std::span<const double> seq, std::size_t n_cols,
                               ConvolutionMode mode);

/// Minimizer of ||A x - b||_2 by Householder QR.
///
/// Throws Error(Shape) on size mismatch and Error(DesignSingular) when the
/// smallest |R_ii| is below 1e-12 times the largest. Callers that need a
/// different error kind catch and rethrow.
std::vector<double> solve_least_squares(const DenseMatrix& a, std::span<const double> b);

double norm2(std::span<const double> v);

// ---------------------------------------------------------------------------
// Seeded randomness
//
// All randomness in the toolkit comes from a counter-based generator: output
// i of a stream with seed s is mix64(mix64(s) + i * 0x9E3779B97F4A7C15),
// where mix64 is the SplitMix64 output function. Uniform doubles take the top
// 53 bits. Gaussian draws use Box-Muller on consecutive uniform pairs
// (cos branch first, then sin branch).
// ---------------------------------------------------------------------------

/// SplitMix64 mixing function; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for trial `index` of a run with `master` seed. Injective in `index`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1).
    double next_uniform() noexcept;
    bool next_bit() noexcept { return (next_u64() >> 63) != 0; }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

class SeededGaussian {
public:
    explicit SeededGaussian(std::uint64_t seed) noexcept : rng_(seed) {}

    double next() noexcept;
    std::uint64_t seed() const noexcept { return rng_.seed(); }

private:
    CounterRng rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// n standard normal draws; advances `gen`.
std::vector<double> gaussian_stream(SeededGaussian& gen, std::size_t n);

} // namespace occ
