#include "ttutv/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <vector>

namespace ttutv::kernels {

namespace {

std::atomic<bool> g_parallel{true};

// Work below this many flops is not worth a parallel region.
constexpr std::int64_t kParallelFlopThreshold = 1 << 16;
constexpr std::int64_t kReduceBlock = 4096;

void check_matmul_dims(std::int64_t inner_a, std::int64_t inner_b) {
    if (inner_a != inner_b)
        throw ArgumentError("matmul inner dimensions do not match");
}

}  // namespace

void set_parallel_enabled(bool enabled) noexcept { g_parallel.store(enabled); }
bool parallel_enabled() noexcept { return g_parallel.load(); }

Matrix matmul_serial(const Matrix& a, const Matrix& b, bool transpose_a, bool transpose_b) {
    const std::int64_t m = transpose_a ? a.cols() : a.rows();
    const std::int64_t k = transpose_a ? a.rows() : a.cols();
    const std::int64_t kb = transpose_b ? b.cols() : b.rows();
    const std::int64_t n = transpose_b ? b.rows() : b.cols();
    check_matmul_dims(k, kb);
    Matrix c(m, n);
    for (std::int64_t j = 0; j < n; ++j)
        for (std::int64_t i = 0; i < m; ++i) {
            double sum = 0.0;
            for (std::int64_t l = 0; l < k; ++l) {
                const double av = transpose_a ? a(l, i) : a(i, l);
                const double bv = transpose_b ? b(j, l) : b(l, j);
                sum += av * bv;
            }
            c(i, j) = sum;
        }
    return c;
}

Matrix matmul(const Matrix& a, const Matrix& b, bool transpose_a, bool transpose_b) {
    const std::int64_t m = transpose_a ? a.cols() : a.rows();
    const std::int64_t k = transpose_a ? a.rows() : a.cols();
    const std::int64_t kb = transpose_b ? b.cols() : b.rows();
    const std::int64_t n = transpose_b ? b.rows() : b.cols();
    check_matmul_dims(k, kb);
    if (!parallel_enabled() || m * n * k < kParallelFlopThreshold)
        return matmul_serial(a, b, transpose_a, transpose_b);
    Matrix c(m, n);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j)
        for (std::int64_t i = 0; i < m; ++i) {
            double sum = 0.0;
            for (std::int64_t l = 0; l < k; ++l) {
                const double av = transpose_a ? a(l, i) : a(i, l);
                const double bv = transpose_b ? b(j, l) : b(l, j);
                sum += av * bv;
            }
            c(i, j) = sum;
        }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::int64_t j = 0; j < a.cols(); ++j)
        for (std::int64_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
    return t;
}

double sum_squares_serial(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return sum;
}

double sum_squares(std::span<const double> values) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    const std::int64_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
    if (blocks <= 1) return sum_squares_serial(values);
    std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
    const bool par = parallel_enabled() && n >= kParallelFlopThreshold;
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
        const std::int64_t lo = blk * kReduceBlock;
        const std::int64_t hi = std::min(n, lo + kReduceBlock);
        double sum = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) sum += values[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(i)];
        partial[static_cast<std::size_t>(blk)] = sum;
    }
    // Combine in block order: the result does not depend on the thread count.
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("dot operands differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw ArgumentError("axpy operands differ in length");
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const bool par = parallel_enabled() && n >= kParallelFlopThreshold;
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

}  // namespace ttutv::kernels
