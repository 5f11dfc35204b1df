#pragma once

#include <cstdint>
#include <vector>

#include "ttutv/dense_tensor.hpp"

namespace ttutv {

/// One tensor-train core of shape (r_{k-1}, I_k, r_k).
struct TTCore {
    DenseTensor data;  // order-3 tensor

    std::int64_t rank_left() const { return data.shape().dim(1); }
    std::int64_t mode_dim() const { return data.shape().dim(2); }
    std::int64_t rank_right() const { return data.shape().dim(3); }

    /// First unfolding, r_{k-1} x (I_k r_k); row-orthonormal for right-orthogonal cores.
    Matrix left_unfolding() const;
    /// Second unfolding, (r_{k-1} I_k) x r_k; column-orthonormal for left-orthogonal cores.
    Matrix right_unfolding() const;
};

/// Tensor train: a chain of order-3 cores with matching bond ranks and
/// boundary ranks 1. The rank chain is validated at construction.
class TTTensor {
public:
    TTTensor() = default;
    explicit TTTensor(std::vector<TTCore> cores);

    std::int64_t order() const noexcept { return static_cast<std::int64_t>(cores_.size()); }
    const std::vector<TTCore>& cores() const noexcept { return cores_; }
    const TTCore& core(std::int64_t k) const { return cores_.at(static_cast<std::size_t>(k - 1)); }  // 1-based

    /// Mode dims (I_1, ..., I_d).
    Shape shape() const;
    /// Rank chain (r_0, ..., r_d) with r_0 = r_d = 1.
    std::vector<std::int64_t> ranks() const;

private:
    std::vector<TTCore> cores_;
};

/// Contracts the chain left to right into a dense tensor. Throws ResourceError
/// if any intermediate would exceed `element_cap` doubles.
DenseTensor reconstruct(const TTTensor& tt, std::int64_t element_cap = 100'000'000);

/// Total number of stored entries: sum_k r_{k-1} * I_k * r_k.
std::int64_t param_count(const TTTensor& tt);

/// Worst-case deviations from the two orthogonality conventions, measured as
/// max-abs entries of G^T G - I over cores 1..d-1 (left) and of G G^T - I
/// over cores 2..d (right).
struct OrthogonalityReport {
    double max_left_deviation = 0.0;
    double max_right_deviation = 0.0;
};

OrthogonalityReport check_orthogonality(const TTTensor& tt);

/// Train for the index-reversed tensor: cores in reverse order with left and
/// right ranks swapped. reconstruct(reverse_tt(X)) == reverse_indices(reconstruct(X)).
TTTensor reverse_tt(const TTTensor& tt);

/// All-zero train with ranks 1 everywhere, the canonical zero point.
TTTensor zero_tt(const Shape& shape);

}  // namespace ttutv
