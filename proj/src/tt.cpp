#include "ttutv/tt.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "ttutv/errors.hpp"
#include "ttutv/kernels.hpp"

namespace ttutv {

Matrix TTCore::left_unfolding() const {
    return Matrix(rank_left(), mode_dim() * rank_right(), data.storage());
}

Matrix TTCore::right_unfolding() const {
    return Matrix(rank_left() * mode_dim(), rank_right(), data.storage());
}

TTTensor::TTTensor(std::vector<TTCore> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw ArgumentError("train needs at least one core");
    for (std::size_t k = 0; k < cores_.size(); ++k)
        if (cores_[k].data.order() != 3)
            throw ArgumentError(fmt::format("core {} has order {}, expected 3", k + 1,
                                            cores_[k].data.order()));
    if (cores_.front().rank_left() != 1 || cores_.back().rank_right() != 1)
        throw ArgumentError("boundary ranks must both be 1");
    for (std::size_t k = 0; k + 1 < cores_.size(); ++k)
        if (cores_[k].rank_right() != cores_[k + 1].rank_left())
            throw ArgumentError(fmt::format("rank mismatch between cores {} and {}: {} vs {}", k + 1,
                                            k + 2, cores_[k].rank_right(), cores_[k + 1].rank_left()));
}

Shape TTTensor::shape() const {
    std::vector<std::int64_t> dims;
    dims.reserve(cores_.size());
    for (const TTCore& core : cores_) dims.push_back(core.mode_dim());
    return Shape(std::move(dims));
}

std::vector<std::int64_t> TTTensor::ranks() const {
    std::vector<std::int64_t> r;
    r.reserve(cores_.size() + 1);
    r.push_back(1);
    for (const TTCore& core : cores_) r.push_back(core.rank_right());
    return r;
}

DenseTensor reconstruct(const TTTensor& tt, std::int64_t element_cap) {
    const Shape shape = tt.shape();
    if (shape.element_count() > element_cap)
        throw ResourceError(fmt::format("reconstruct would materialize {} elements (cap {})",
                                        shape.element_count(), element_cap));

    // Left-to-right accumulation: B holds (I_1...I_k) x r_k.
    Matrix b = tt.cores().front().right_unfolding();  // (1*I_1) x r_1
    std::int64_t left_count = shape.dim(1);
    for (std::size_t k = 1; k < tt.cores().size(); ++k) {
        const TTCore& core = tt.cores()[k];
        const std::int64_t grown = left_count * core.mode_dim();
        if (grown * core.rank_right() > element_cap)
            throw ResourceError(fmt::format("reconstruct intermediate would reach {} elements (cap {})",
                                            grown * core.rank_right(), element_cap));
        // (left x r_{k-1}) * (r_{k-1} x I_k r_k), then reshape to (left*I_k) x r_k.
        Matrix next = kernels::matmul(b, core.left_unfolding());
        b = Matrix(grown, core.rank_right(), next.take_storage());
        left_count = grown;
    }
    return DenseTensor(shape, b.take_storage());
}

std::int64_t param_count(const TTTensor& tt) {
    std::int64_t total = 0;
    for (const TTCore& core : tt.cores()) total += core.rank_left() * core.mode_dim() * core.rank_right();
    return total;
}

namespace {

double max_abs_gram_deviation(const Matrix& g, bool rows_orthonormal) {
    // rows_orthonormal: check G G^T - I, else G^T G - I.
    const Matrix gram = rows_orthonormal ? kernels::matmul(g, g, false, true)
                                         : kernels::matmul(g, g, true, false);
    double worst = 0.0;
    for (std::int64_t j = 0; j < gram.cols(); ++j)
        for (std::int64_t i = 0; i < gram.rows(); ++i)
            worst = std::max(worst, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

}  // namespace

OrthogonalityReport check_orthogonality(const TTTensor& tt) {
    OrthogonalityReport report;
    const std::int64_t d = tt.order();
    for (std::int64_t k = 1; k <= d - 1; ++k)
        report.max_left_deviation = std::max(
            report.max_left_deviation, max_abs_gram_deviation(tt.core(k).right_unfolding(), false));
    for (std::int64_t k = 2; k <= d; ++k)
        report.max_right_deviation = std::max(
            report.max_right_deviation, max_abs_gram_deviation(tt.core(k).left_unfolding(), true));
    return report;
}

TTTensor reverse_tt(const TTTensor& tt) {
    std::vector<TTCore> cores;
    cores.reserve(tt.cores().size());
    for (auto it = tt.cores().rbegin(); it != tt.cores().rend(); ++it) {
        const TTCore& src = *it;
        const std::int64_t rl = src.rank_left(), mid = src.mode_dim(), rr = src.rank_right();
        DenseTensor flipped{Shape({rr, mid, rl})};
        // Transpose every lateral slice: out(b, i, a) = in(a, i, b).
        for (std::int64_t b = 0; b < rr; ++b)
            for (std::int64_t i = 0; i < mid; ++i)
                for (std::int64_t a = 0; a < rl; ++a)
                    flipped[b + i * rr + a * rr * mid] = src.data[a + i * rl + b * rl * mid];
        cores.push_back(TTCore{std::move(flipped)});
    }
    return TTTensor(std::move(cores));
}

TTTensor zero_tt(const Shape& shape) {
    if (shape.order() < 1) throw ArgumentError("zero train needs order >= 1");
    std::vector<TTCore> cores;
    cores.reserve(static_cast<std::size_t>(shape.order()));
    for (std::int64_t k = 1; k <= shape.order(); ++k)
        cores.push_back(TTCore{DenseTensor{Shape({1, shape.dim(k), 1})}});
    return TTTensor(std::move(cores));
}

}  // namespace ttutv
