#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ttutv/dense_tensor.hpp"
#include "ttutv/tt.hpp"

namespace ttutv {

enum class Method { svd, ulv, urv };
enum class Sweep { left_to_right, right_to_left };

/// What the right-to-left ULV sweep keeps of each truncated factorization:
/// only the leading triangular block (cheapest, linear-sum error bound) or the
/// full column block, which restores the root-sum-square bound at the cost of
/// one extra multiply per step.
enum class Retain { l11_only, full_column };

/// Target rank chain (r_0, ..., r_d); boundary entries must be 1.
struct FixedRank {
    std::vector<std::int64_t> ranks;
};

/// Relative tolerance: the per-step budgets are eps_k = weight_k * eps * |A|_F.
/// Empty weights select the equal split. For root-sum-square paths the squared
/// weights must sum to 1; for the linear-sum path the weights themselves must.
struct FixedTol {
    double eps = 0.0;
    std::vector<double> weights;
};

struct DecompConfig {
    Method method = Method::svd;
    Sweep sweep = Sweep::left_to_right;
    std::variant<FixedRank, FixedTol> mode = FixedRank{};
    int refine_passes = 1;
    Retain retain = Retain::l11_only;  // right-to-left ULV only
    /// Verifies the internal carry identity at every step (the next working
    /// matrix must equal U1^T applied to the previous one).
    bool debug_checks = false;
};

enum class BoundKind { root_sum_square, plain_sum };

struct DecompReport {
    /// Per-step truncation errors in unfolding order (epsilon_k for the cut
    /// after mode k, k = 1..d-1), regardless of sweep direction.
    std::vector<double> step_errors;
    std::vector<std::int64_t> ranks_requested;  // fixed-rank mode only
    std::vector<std::int64_t> ranks_chosen;     // effective chain, length d+1
    double bound = 0.0;
    BoundKind bound_kind = BoundKind::root_sum_square;
    std::optional<double> achieved_error;  // |A - reconstruct|_F, filled by verify_bound
    double input_norm = 0.0;
    double wall_time_ms = 0.0;
    std::vector<std::string> warnings;
};

struct DecompResult {
    TTTensor tt;
    DecompReport report;
};

/// Classic truncated-SVD sweep in either direction (method must be svd).
DecompResult tt_svd(const DenseTensor& a, const DecompConfig& config);

/// Left-to-right sweep truncating a ULV factorization at fixed ranks; output
/// cores 1..d-1 are left-orthogonal, error bound sqrt(sum eps_k^2).
DecompResult tt_ulv_fixed_rank_l2r(const DenseTensor& a, const std::vector<std::int64_t>& ranks,
                                   int refine_passes = 1);

/// Fixed-precision variant: per-step budgets w_k * eps * |A|_F guarantee
/// |A - result|_F <= eps * |A|_F.
DecompResult tt_ulv_fixed_tol_l2r(const DenseTensor& a, double eps,
                                  const std::vector<double>& weights = {}, int refine_passes = 1);

/// Right-to-left sweep truncating a URV factorization at fixed ranks; output
/// cores 2..d are right-orthogonal, error bound sqrt(sum eps_k^2).
DecompResult tt_urv_fixed_rank_r2l(const DenseTensor& a, const std::vector<std::int64_t>& ranks,
                                   int refine_passes = 1);

DecompResult tt_urv_fixed_tol_r2l(const DenseTensor& a, double eps,
                                  const std::vector<double>& weights = {}, int refine_passes = 1);

/// Right-to-left ULV sweep. With Retain::l11_only the residuals are no longer
/// orthogonal to the kept factors, so the bound degrades to a plain sum;
/// Retain::full_column restores the root-sum-square bound.
DecompResult tt_ulv_fixed_rank_r2l(const DenseTensor& a, const std::vector<std::int64_t>& ranks,
                                   Retain retain = Retain::l11_only, int refine_passes = 1);

/// Left-orthogonal train from the URV path: runs the right-to-left URV sweep
/// on the index-reversed tensor and reverses the resulting train.
DecompResult left_orthogonal_via_urv(const DenseTensor& a, const DecompConfig& config);

/// Uniform entry point dispatching on (method, sweep, mode).
DecompResult decompose(const DenseTensor& a, const DecompConfig& config);

/// Reconstructs, fills report.achieved_error, and checks it against
/// report.bound plus slack_rel * |A|_F; throws InvariantError listing both
/// numbers on violation. Returns the achieved error.
double verify_bound(const DenseTensor& a, const TTTensor& tt, DecompReport& report,
                    double slack_rel = 1e-8, std::int64_t element_cap = 100'000'000);

}  // namespace ttutv
