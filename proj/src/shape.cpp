#include "ttutv/shape.hpp"

#include <fmt/format.h>

#include "ttutv/matrix.hpp"

namespace ttutv {

namespace {
// Elements must also be addressable in bytes, hence the /8.
constexpr std::int64_t kMaxElements = INT64_MAX / 8;
}  // namespace

Shape::Shape(std::vector<std::int64_t> dims) : dims_(std::move(dims)) {
    count_ = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        const std::int64_t dim = dims_[k];
        if (dim < 1)
            throw ArgumentError(fmt::format("shape dim {} is {}, must be >= 1", k + 1, dim));
        if (count_ > kMaxElements / dim)
            throw ArgumentError("shape element count overflows the index range");
        count_ *= dim;
    }
}

std::int64_t Shape::dim(std::int64_t k) const {
    if (k < 1 || k > order()) throw IndexError(fmt::format("mode {} out of range 1..{}", k, order()));
    return dims_[static_cast<std::size_t>(k - 1)];
}

std::int64_t Shape::prefix_product(std::int64_t k) const {
    if (k < 0 || k > order()) throw IndexError(fmt::format("prefix length {} out of range 0..{}", k, order()));
    std::int64_t prod = 1;
    for (std::int64_t j = 0; j < k; ++j) prod *= dims_[static_cast<std::size_t>(j)];
    return prod;
}

std::int64_t ivec(std::span<const std::int64_t> index, const Shape& shape) {
    if (static_cast<std::int64_t>(index.size()) != shape.order())
        throw IndexError(fmt::format("multi-index has {} entries, tensor order is {}", index.size(),
                                     shape.order()));
    std::int64_t linear = 1;
    std::int64_t stride = 1;
    for (std::int64_t k = 0; k < shape.order(); ++k) {
        const std::int64_t ik = index[static_cast<std::size_t>(k)];
        const std::int64_t dim = shape.dims()[static_cast<std::size_t>(k)];
        if (ik < 1 || ik > dim)
            throw IndexError(fmt::format("index {} out of range 1..{} in mode {}", ik, dim, k + 1));
        linear += (ik - 1) * stride;
        stride *= dim;
    }
    return linear;
}

void ivec_inverse(std::int64_t linear, const Shape& shape, std::span<std::int64_t> index_out) {
    if (linear < 1 || linear > shape.element_count())
        throw IndexError(fmt::format("linear index {} out of range 1..{}", linear, shape.element_count()));
    if (static_cast<std::int64_t>(index_out.size()) != shape.order())
        throw IndexError("output multi-index has wrong order");
    std::int64_t rest = linear - 1;
    for (std::int64_t k = 0; k < shape.order(); ++k) {
        const std::int64_t dim = shape.dims()[static_cast<std::size_t>(k)];
        index_out[static_cast<std::size_t>(k)] = rest % dim + 1;
        rest /= dim;
    }
}

bool next_index(std::span<std::int64_t> index, const Shape& shape) {
    for (std::int64_t k = 0; k < shape.order(); ++k) {
        auto& ik = index[static_cast<std::size_t>(k)];
        if (ik < shape.dims()[static_cast<std::size_t>(k)]) {
            ++ik;
            return true;
        }
        ik = 1;
    }
    return false;
}

std::int64_t Matrix::check_size(std::int64_t rows, std::int64_t cols) {
    if (rows < 0 || cols < 0) throw ArgumentError("matrix dims must be nonnegative");
    if (rows > 0 && cols > kMaxElements / (rows > 0 ? rows : 1))
        throw ArgumentError("matrix element count overflows the index range");
    return rows * cols;
}

}  // namespace ttutv
