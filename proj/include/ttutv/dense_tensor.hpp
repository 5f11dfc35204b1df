#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ttutv/matrix.hpp"
#include "ttutv/shape.hpp"

namespace ttutv {

/// Dense order-d tensor stored as a flat double array in linearization order
/// (first mode fastest). An order-2 DenseTensor and a Matrix of the same dims
/// share the exact byte layout.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape)
        : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_.element_count()), 0.0) {}
    DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (static_cast<std::int64_t>(data_.size()) != shape_.element_count())
            throw ArgumentError("tensor storage size does not match shape");
    }

    const Shape& shape() const noexcept { return shape_; }
    std::int64_t order() const noexcept { return shape_.order(); }
    std::int64_t element_count() const noexcept { return shape_.element_count(); }

    /// 1-based multi-index access (bounds-checked via ivec).
    double& at(std::span<const std::int64_t> index) { return data_[ivec(index, shape_) - 1]; }
    double at(std::span<const std::int64_t> index) const { return data_[ivec(index, shape_) - 1]; }
    double& at(std::initializer_list<std::int64_t> index) {
        return at(std::span<const std::int64_t>(index.begin(), index.size()));
    }
    double at(std::initializer_list<std::int64_t> index) const {
        return const_cast<DenseTensor*>(this)->at(index);
    }

    /// 0-based flat storage access, no bounds check.
    double& operator[](std::int64_t i) noexcept { return data_[i]; }
    double operator[](std::int64_t i) const noexcept { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::vector<double>& storage() noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }
    std::vector<double> take_storage() noexcept {
        shape_ = Shape();
        return std::move(data_);
    }

    /// Bitwise equality of shape and payload.
    bool operator==(const DenseTensor& other) const noexcept {
        return shape_ == other.shape_ && data_ == other.data_;
    }

private:
    Shape shape_;
    std::vector<double> data_;
};

}  // namespace ttutv
