#pragma once

#include <cstdint>

#include "ttutv/dense_tensor.hpp"
#include "ttutv/matrix.hpp"

namespace ttutv {

/// kth unfolding: rows fuse modes 1..k, columns fuse modes k+1..d, both in
/// linearization order. Pure reshape of the flat buffer (1 <= k <= d-1).
Matrix unfold(const DenseTensor& tensor, std::int64_t k);

/// Inverse of unfold: reshapes an (I_1...I_k) x (I_{k+1}...I_d) matrix back
/// into a tensor of the given shape.
DenseTensor fold(const Matrix& mat, const Shape& shape, std::int64_t k);
DenseTensor fold(Matrix&& mat, const Shape& shape, std::int64_t k);

/// Mode-k product (X x_k M): contracts mode k of X with the columns of M,
/// replacing I_k by M.rows(). Requires M.cols() == I_k.
DenseTensor mode_product(const DenseTensor& tensor, const Matrix& mat, std::int64_t k);

/// Kronecker product; (A kron B)(i*pB+k, j*qB+l) = A(i,j)*B(k,l) in 0-based terms.
Matrix kron(const Matrix& a, const Matrix& b);

double frobenius_norm(const DenseTensor& tensor);
double frobenius_norm(const Matrix& mat);

/// Relative error in the Frobenius norm; truth must have nonzero norm.
double rse(const DenseTensor& estimate, const DenseTensor& truth);

/// Peak signal-to-noise ratio against the max entry of truth; returns
/// +infinity when estimate and truth coincide elementwise.
double psnr(const DenseTensor& estimate, const DenseTensor& truth);

/// Tensor with all modes reversed: B(i_d, ..., i_1) = A(i_1, ..., i_d).
DenseTensor reverse_indices(const DenseTensor& tensor);

}  // namespace ttutv
