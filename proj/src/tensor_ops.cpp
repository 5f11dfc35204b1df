#include "ttutv/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "ttutv/kernels.hpp"

namespace ttutv {

namespace {

void check_unfold_mode(const Shape& shape, std::int64_t k) {
    if (shape.order() < 2) throw ArgumentError("unfold requires order >= 2");
    if (k < 1 || k >= shape.order())
        throw ArgumentError(fmt::format("unfold mode {} out of range 1..{}", k, shape.order() - 1));
}

}  // namespace

Matrix unfold(const DenseTensor& tensor, std::int64_t k) {
    check_unfold_mode(tensor.shape(), k);
    const std::int64_t rows = tensor.shape().prefix_product(k);
    const std::int64_t cols = tensor.element_count() / rows;
    return Matrix(rows, cols, tensor.storage());
}

DenseTensor fold(const Matrix& mat, const Shape& shape, std::int64_t k) {
    check_unfold_mode(shape, k);
    const std::int64_t rows = shape.prefix_product(k);
    if (mat.rows() != rows || mat.cols() != shape.element_count() / rows)
        throw ArgumentError(fmt::format("fold: matrix is {}x{}, expected {}x{}", mat.rows(), mat.cols(),
                                        rows, shape.element_count() / rows));
    return DenseTensor(shape, mat.storage());
}

DenseTensor fold(Matrix&& mat, const Shape& shape, std::int64_t k) {
    check_unfold_mode(shape, k);
    const std::int64_t rows = shape.prefix_product(k);
    if (mat.rows() != rows || mat.cols() != shape.element_count() / rows)
        throw ArgumentError(fmt::format("fold: matrix is {}x{}, expected {}x{}", mat.rows(), mat.cols(),
                                        rows, shape.element_count() / rows));
    return DenseTensor(shape, mat.take_storage());
}

DenseTensor mode_product(const DenseTensor& tensor, const Matrix& mat, std::int64_t k) {
    const Shape& shape = tensor.shape();
    if (k < 1 || k > shape.order())
        throw ArgumentError(fmt::format("mode {} out of range 1..{}", k, shape.order()));
    if (mat.cols() != shape.dim(k))
        throw ArgumentError(fmt::format("mode-{} product needs {} columns, matrix has {}", k,
                                        shape.dim(k), mat.cols()));

    const std::int64_t left = shape.prefix_product(k - 1);
    const std::int64_t mid = shape.dim(k);
    const std::int64_t right = tensor.element_count() / (left * mid);
    const std::int64_t new_mid = mat.rows();

    std::vector<std::int64_t> new_dims(shape.dims().begin(), shape.dims().end());
    new_dims[static_cast<std::size_t>(k - 1)] = new_mid;
    DenseTensor out{Shape(std::move(new_dims))};

    // Contract mode k slice by slice: for each outer block the tensor data is
    // a left x mid column-major panel.
    for (std::int64_t r = 0; r < right; ++r) {
        const double* src = tensor.data() + r * left * mid;
        double* dst = out.data() + r * left * new_mid;
        for (std::int64_t jn = 0; jn < new_mid; ++jn)
            for (std::int64_t i = 0; i < left; ++i) {
                double sum = 0.0;
                for (std::int64_t j = 0; j < mid; ++j) sum += mat(jn, j) * src[i + j * left];
                dst[i + jn * left] = sum;
            }
    }
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::int64_t ja = 0; ja < a.cols(); ++ja)
        for (std::int64_t jb = 0; jb < b.cols(); ++jb) {
            const std::int64_t j = ja * b.cols() + jb;
            for (std::int64_t ia = 0; ia < a.rows(); ++ia) {
                const double av = a(ia, ja);
                for (std::int64_t ib = 0; ib < b.rows(); ++ib)
                    out(ia * b.rows() + ib, j) = av * b(ib, jb);
            }
        }
    return out;
}

double frobenius_norm(const DenseTensor& tensor) {
    return std::sqrt(kernels::sum_squares(tensor.storage()));
}

double frobenius_norm(const Matrix& mat) { return std::sqrt(kernels::sum_squares(mat.storage())); }

double rse(const DenseTensor& estimate, const DenseTensor& truth) {
    if (!(estimate.shape() == truth.shape())) throw ArgumentError("rse: shapes differ");
    const double denom = frobenius_norm(truth);
    if (denom == 0.0) throw ArgumentError("rse: truth has zero norm (domain error)");
    double diff_sq = 0.0;
    for (std::int64_t i = 0; i < truth.element_count(); ++i) {
        const double d = estimate[i] - truth[i];
        diff_sq += d * d;
    }
    return std::sqrt(diff_sq) / denom;
}

double psnr(const DenseTensor& estimate, const DenseTensor& truth) {
    if (!(estimate.shape() == truth.shape())) throw ArgumentError("psnr: shapes differ");
    const std::int64_t n = truth.element_count();
    double max_val = truth[0];
    double mse = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        max_val = std::max(max_val, truth[i]);
        const double d = estimate[i] - truth[i];
        mse += d * d;
    }
    mse /= static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_val * max_val / mse);
}

DenseTensor reverse_indices(const DenseTensor& tensor) {
    const Shape& shape = tensor.shape();
    std::vector<std::int64_t> rev_dims(shape.dims().rbegin(), shape.dims().rend());
    DenseTensor out{Shape(std::move(rev_dims))};
    const std::int64_t d = shape.order();

    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 1);
    std::vector<std::int64_t> rev_idx(static_cast<std::size_t>(d), 1);
    std::int64_t linear = 0;
    do {
        for (std::int64_t k = 0; k < d; ++k)
            rev_idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(d - 1 - k)];
        out.at(std::span<const std::int64_t>(rev_idx)) = tensor[linear++];
    } while (next_index(idx, shape));
    return out;
}

}  // namespace ttutv
