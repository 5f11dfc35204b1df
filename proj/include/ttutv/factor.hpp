#pragma once

#include <cstdint>
#include <vector>

#include "ttutv/matrix.hpp"

namespace ttutv {

/// Result of Householder QR with column pivoting: A(:, perm) = Q * R with
/// Q m x p column-orthonormal, R p x n upper-triangular (p = min(m, n)) and
/// nonincreasing diagonal magnitudes. perm[j] is the 0-based source column.
struct QrPivotResult {
    Matrix q;
    Matrix r;
    std::vector<std::int64_t> perm;
};

QrPivotResult qr_col_pivot(const Matrix& a);

/// Economy singular value decomposition A = U * diag(s) * V^T computed with
/// one-sided Jacobi rotations; s is sorted nonincreasing, U is m x p, V is
/// n x p with p = min(m, n).
struct SvdResult {
    Matrix u;
    std::vector<double> s;
    Matrix v;
};

struct SvdOptions {
    int max_sweeps = 60;
    double pair_tol = 1e-14;  // |<w_i,w_j>| <= pair_tol*|w_i||w_j| counts as orthogonal
};

SvdResult svd(const Matrix& a, const SvdOptions& options = {});

/// Two-sided orthogonal factorization A = U * L * V^T with L lower-triangular
/// p x p ("rotated" triangular form whose diagonal tracks the spectrum).
struct UlvFactors {
    Matrix u;  // m x p
    Matrix l;  // p x p lower-triangular
    Matrix v;  // n x p
};

/// A = U * R * V^T with R upper-triangular p x p.
struct UrvFactors {
    Matrix u;
    Matrix r;
    Matrix v;
};

/// Built from alternating column-pivoted QR passes. refine_passes counts the
/// pivoted passes beyond the first; 0 selects the cheapest single-pass form
/// (one extra structural pass is forced when a single pass cannot produce a
/// square middle factor). The default 1 is the classic two-pass scheme.
UlvFactors ulv(const Matrix& a, int refine_passes = 1);
UrvFactors urv(const Matrix& a, int refine_passes = 1);

enum class FactorKind { svd, ulv, urv };

/// Leading rank-r slice of a factorization: A ~ U1 * T11 * V1^T. The residual
/// E = A - U1 T11 V1^T satisfies U1^T E = 0 (svd/ulv) or E V1 = 0 (svd/urv),
/// hence residual_norm^2 == |A|_F^2 - |T11|_F^2 up to roundoff.
struct TruncatedFactorization {
    FactorKind kind = FactorKind::svd;
    std::int64_t rank = 0;
    Matrix u1;   // m x rank
    Matrix t11;  // rank x rank (diagonal for svd)
    Matrix v1;   // n x rank
    double residual_norm = 0.0;
};

TruncatedFactorization truncate_fixed_rank(const SvdResult& f, std::int64_t rank);
TruncatedFactorization truncate_fixed_rank(const UlvFactors& f, std::int64_t rank);
TruncatedFactorization truncate_fixed_rank(const UrvFactors& f, std::int64_t rank);

/// Smallest rank whose residual does not exceed eps (absolute, Frobenius),
/// found by a cumulative scan over leading blocks; the rank floor is 1.
/// eps = 0 keeps the full rank p with residual 0.
TruncatedFactorization truncate_fixed_tol(const SvdResult& f, double eps);
TruncatedFactorization truncate_fixed_tol(const UlvFactors& f, double eps);
TruncatedFactorization truncate_fixed_tol(const UrvFactors& f, double eps);

/// Rank-revealing diagnostics of a factorization at split rank r:
/// how well the leading block's smallest singular value tracks sigma_r and
/// how large the discarded block is next to sigma_{r+1}.
struct RankRevealDiag {
    double sigma_min_t11 = 0.0;          // smallest singular value of T11
    double residual_spectral_norm = 0.0; // |discarded block|_2
    double sigma_r = 0.0;                // rth singular value of A
    double sigma_r_plus_1 = 0.0;         // 0 when r == p
};

RankRevealDiag rank_reveal_diag(const UlvFactors& f, std::int64_t rank);
RankRevealDiag rank_reveal_diag(const UrvFactors& f, std::int64_t rank);

}  // namespace ttutv
