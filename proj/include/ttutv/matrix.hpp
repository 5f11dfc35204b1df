#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ttutv/errors.hpp"

namespace ttutv {

/// Dense column-major matrix of doubles. The flat storage of an m x n Matrix
/// is bit-identical to an order-2 tensor of shape (m, n), so reshapes between
/// the two move the buffer instead of copying.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::int64_t rows, std::int64_t cols)
        : rows_(rows), cols_(cols), data_(check_size(rows, cols), 0.0) {}
    Matrix(std::int64_t rows, std::int64_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (static_cast<std::int64_t>(data_.size()) != check_size(rows, cols))
            throw ArgumentError("matrix storage size does not match rows*cols");
    }

    static Matrix identity(std::int64_t n) {
        Matrix eye(n, n);
        for (std::int64_t i = 0; i < n; ++i) eye(i, i) = 1.0;
        return eye;
    }

    std::int64_t rows() const noexcept { return rows_; }
    std::int64_t cols() const noexcept { return cols_; }
    std::int64_t size() const noexcept { return rows_ * cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::int64_t i, std::int64_t j) noexcept { return data_[i + j * rows_]; }
    double operator()(std::int64_t i, std::int64_t j) const noexcept { return data_[i + j * rows_]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    double* col(std::int64_t j) noexcept { return data_.data() + j * rows_; }
    const double* col(std::int64_t j) const noexcept { return data_.data() + j * rows_; }

    std::vector<double>& storage() noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }
    /// Moves the buffer out, leaving an empty matrix.
    std::vector<double> take_storage() noexcept {
        rows_ = cols_ = 0;
        return std::move(data_);
    }

private:
    static std::int64_t check_size(std::int64_t rows, std::int64_t cols);

    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace ttutv
