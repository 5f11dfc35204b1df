#pragma once

#include <cstdint>
#include <span>

#include "ttutv/matrix.hpp"

namespace ttutv::kernels {

/// Globally enables or disables the OpenMP paths; the serial fallbacks are
/// bitwise-identical by construction (identical per-element accumulation
/// order), so flipping this never changes results, only timing.
void set_parallel_enabled(bool enabled) noexcept;
bool parallel_enabled() noexcept;

/// C = op(A) * op(B) with op(X) = X or X^T. Each output element is one serial
/// dot product, so the OpenMP version matches the serial one bit for bit.
Matrix matmul(const Matrix& a, const Matrix& b, bool transpose_a = false, bool transpose_b = false);
/// Plain triple-loop reference used by tests and the kernel benchmark.
Matrix matmul_serial(const Matrix& a, const Matrix& b, bool transpose_a = false, bool transpose_b = false);

Matrix transpose(const Matrix& a);

/// Sum of squares with a fixed blocking scheme: partial sums over fixed-size
/// blocks are combined in block order, so the result is independent of the
/// thread count.
double sum_squares(std::span<const double> values);
/// Straight left-to-right accumulation, kept as the test reference.
double sum_squares_serial(std::span<const double> values);

double dot(std::span<const double> x, std::span<const double> y);

/// y = alpha*x + y over flat buffers of equal length.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace ttutv::kernels
