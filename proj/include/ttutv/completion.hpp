#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttutv/dense_tensor.hpp"
#include "ttutv/tt.hpp"
#include "ttutv/tt_decomp.hpp"

namespace ttutv {

/// Set of observed positions with their values. Indices are stored 0-based
/// linear, strictly increasing; construction validates range and uniqueness.
class ObservationMask {
public:
    ObservationMask() = default;
    /// From 1-based multi-indices.
    ObservationMask(const Shape& shape, const std::vector<std::vector<std::int64_t>>& indices,
                    const std::vector<double>& values);
    /// From a 0/1 indicator tensor (nonzero = observed) and a value tensor of
    /// the same shape; values outside the mask are ignored.
    ObservationMask(const DenseTensor& indicator, const DenseTensor& values);

    const Shape& shape() const noexcept { return shape_; }
    std::int64_t count() const noexcept { return static_cast<std::int64_t>(linear_.size()); }
    const std::vector<std::int64_t>& linear_indices() const noexcept { return linear_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double values_norm() const;

private:
    Shape shape_;
    std::vector<std::int64_t> linear_;  // 0-based, strictly increasing
    std::vector<double> values_;
};

/// Copies the entries of `tensor` at the observed positions, zero elsewhere.
DenseTensor project_observed(const DenseTensor& tensor, const ObservationMask& mask);

struct CompletionConfig {
    std::vector<std::int64_t> ranks;  // target chain (r_0, ..., r_d)
    Method retraction = Method::svd;
    double step_size = 1.0;
    int max_iters = 500;
    /// Convergence: relative change of the observed-entry error over a
    /// 5-iteration window drops strictly below this. 0 disables the check.
    double stop_tol = 1e-6;
    std::uint64_t seed = 42;
    /// Iterated truncation amplifies any per-step suboptimality of the
    /// retraction, so completion defaults to one more refinement pass than a
    /// one-shot decomposition; with a single pass the gradient iteration can
    /// stall or diverge on spiky spectra.
    int refine_passes = 2;
    std::int64_t dense_cap = 10'000'000;  // max elements to materialize
};

enum class CompletionStatus { converged, max_iters, diverged };

struct IterationTrace {
    std::vector<double> rse_observed;
    std::vector<double> rse_full;      // empty without ground truth
    std::vector<double> psnr;          // empty without ground truth
    std::vector<double> wall_time_ms;  // cumulative
    CompletionStatus status = CompletionStatus::max_iters;
    std::string note;
};

struct CompletionResult {
    TTTensor tt;
    IterationTrace trace;
};

/// Rank-projected iteration: X <- Retract(X + step * (observed - X on mask)).
/// The retraction is the fixed-rank train decomposition selected by
/// config.retraction. Deterministic for a given mask and config.
CompletionResult complete(const ObservationMask& mask, const Shape& shape,
                          const CompletionConfig& config, const DenseTensor* truth = nullptr);

/// Starting point: retraction of the observed values embedded in zeros.
TTTensor initial_guess(const ObservationMask& mask, const Shape& shape,
                       const CompletionConfig& config);

}  // namespace ttutv
