#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ttutv/errors.hpp"

namespace ttutv {

/// Dimension tuple (I_1, ..., I_d) of an order-d tensor. Every dim is >= 1 and
/// the element count fits a signed 64-bit index with room for byte offsets.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::int64_t> dims);

    std::int64_t order() const noexcept { return static_cast<std::int64_t>(dims_.size()); }
    /// 1-based mode accessor: dim(1) == I_1.
    std::int64_t dim(std::int64_t k) const;
    std::span<const std::int64_t> dims() const noexcept { return dims_; }
    std::int64_t element_count() const noexcept { return count_; }

    /// Product of dims 1..k (1-based, inclusive); k = 0 yields 1.
    std::int64_t prefix_product(std::int64_t k) const;

    bool operator==(const Shape& other) const noexcept { return dims_ == other.dims_; }

private:
    std::vector<std::int64_t> dims_;
    std::int64_t count_ = 1;
};

/// Linearization of a 1-based multi-index: the first mode varies fastest.
/// Returns a 1-based linear index in [1, element_count].
std::int64_t ivec(std::span<const std::int64_t> index, const Shape& shape);

/// Inverse of ivec: writes the 1-based multi-index of 1-based `linear`.
void ivec_inverse(std::int64_t linear, const Shape& shape, std::span<std::int64_t> index_out);

/// Odometer step over 1-based multi-indices in linearization order.
/// Returns false (and leaves `index` at all-ones) after the last index.
bool next_index(std::span<std::int64_t> index, const Shape& shape);

}  // namespace ttutv
