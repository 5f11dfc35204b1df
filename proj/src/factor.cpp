#include "ttutv/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "ttutv/errors.hpp"
#include "ttutv/kernels.hpp"

namespace ttutv {

namespace {

// ---------------------------------------------------------------------------
// Householder QR with column pivoting.
// ---------------------------------------------------------------------------

// Reflector for x = work(k:m, k): overwrites the column with [new_diag; v/v0]
// where H = I - beta*v*v^T maps x onto new_diag * e1. Returns beta (0 when the
// subcolumn is already zero).
double make_householder(Matrix& work, std::int64_t k, std::int64_t m) {
    double* x = work.col(k) + k;
    const std::int64_t len = m - k;
    if (len <= 1) return 0.0;
    double sigma = 0.0;
    for (std::int64_t i = 1; i < len; ++i) sigma += x[i] * x[i];
    const double alpha = x[0];
    if (sigma == 0.0) return 0.0;  // already upper-triangular in this column
    const double mu = std::sqrt(alpha * alpha + sigma);
    const double v0 = alpha + std::copysign(mu, alpha);
    const double beta = v0 * v0 / (std::copysign(mu, alpha) * v0);  // = v0 / (sign(alpha)*mu)
    for (std::int64_t i = 1; i < len; ++i) x[i] /= v0;
    x[0] = -std::copysign(mu, alpha);
    return beta;
}

// Applies H_k = I - beta*v*v^T (v implicit in column k, v[0] = 1) to columns
// [from, to) of work. Each column update is an independent serial dot+axpy,
// so the parallel and serial paths agree bitwise.
void apply_reflector(Matrix& work, std::int64_t k, std::int64_t m, double beta, std::int64_t from,
                     std::int64_t to) {
    if (beta == 0.0 || from >= to) return;
    const double* v = work.col(k) + k;  // v[0] is the stored diagonal; treat as 1
    const std::int64_t len = m - k;
    const bool par = kernels::parallel_enabled() && (to - from) * len > (1 << 14);
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t j = from; j < to; ++j) {
        double* c = work.col(j) + k;
        double t = c[0];
        for (std::int64_t i = 1; i < len; ++i) t += v[i] * c[i];
        t *= beta;
        c[0] -= t;
        for (std::int64_t i = 1; i < len; ++i) c[i] -= t * v[i];
    }
}

}  // namespace

QrPivotResult qr_col_pivot(const Matrix& a) {
    const std::int64_t m = a.rows();
    const std::int64_t n = a.cols();
    if (m == 0 || n == 0) throw ArgumentError("qr_col_pivot: empty matrix");
    const std::int64_t p = std::min(m, n);

    Matrix work = a;
    std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), std::int64_t{0});
    std::vector<double> beta(static_cast<std::size_t>(p), 0.0);

    // Squared trailing column norms, downdated per step; the guard recomputes
    // a norm once cancellation has eaten half the mantissa (ratio 1e-8).
    std::vector<double> cnorm2(static_cast<std::size_t>(n), 0.0);
    std::vector<double> cref2(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t j = 0; j < n; ++j) {
        cnorm2[static_cast<std::size_t>(j)] =
            kernels::sum_squares_serial({work.col(j), static_cast<std::size_t>(m)});
        cref2[static_cast<std::size_t>(j)] = cnorm2[static_cast<std::size_t>(j)];
    }

    for (std::int64_t k = 0; k < p; ++k) {
        // Largest remaining squared norm wins; ties break to the lowest index.
        std::int64_t piv = k;
        for (std::int64_t j = k + 1; j < n; ++j)
            if (cnorm2[static_cast<std::size_t>(j)] > cnorm2[static_cast<std::size_t>(piv)]) piv = j;
        if (piv != k) {
            std::swap_ranges(work.col(k), work.col(k) + m, work.col(piv));
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
            std::swap(cnorm2[static_cast<std::size_t>(k)], cnorm2[static_cast<std::size_t>(piv)]);
            std::swap(cref2[static_cast<std::size_t>(k)], cref2[static_cast<std::size_t>(piv)]);
        }

        beta[static_cast<std::size_t>(k)] = make_householder(work, k, m);
        apply_reflector(work, k, m, beta[static_cast<std::size_t>(k)], k + 1, n);

        for (std::int64_t j = k + 1; j < n; ++j) {
            auto ju = static_cast<std::size_t>(j);
            const double rkj = work(k, j);
            cnorm2[ju] -= rkj * rkj;
            if (cnorm2[ju] < 1e-16 * cref2[ju] || cnorm2[ju] < 0.0) {
                cnorm2[ju] = kernels::sum_squares_serial(
                    {work.col(j) + (k + 1), static_cast<std::size_t>(m - k - 1)});
                cref2[ju] = cnorm2[ju];
            }
        }
    }

    Matrix r(p, n);
    for (std::int64_t j = 0; j < n; ++j)
        for (std::int64_t i = 0; i <= std::min(j, p - 1); ++i) r(i, j) = work(i, j);

    // Economy Q: apply the reflectors in reverse to the leading identity
    // columns. beta == 0 leaves identity columns untouched (zero input case).
    Matrix q(m, p);
    for (std::int64_t j = 0; j < p; ++j) q(j, j) = 1.0;
    for (std::int64_t k = p - 1; k >= 0; --k) {
        const double bk = beta[static_cast<std::size_t>(k)];
        if (bk == 0.0) continue;
        const double* v = work.col(k) + k;
        const std::int64_t len = m - k;
        const bool par = kernels::parallel_enabled() && (p - k) * len > (1 << 14);
#pragma omp parallel for schedule(static) if (par)
        for (std::int64_t j = k; j < p; ++j) {
            double* c = q.col(j) + k;
            double t = c[0];
            for (std::int64_t i = 1; i < len; ++i) t += v[i] * c[i];
            t *= bk;
            c[0] -= t;
            for (std::int64_t i = 1; i < len; ++i) c[i] -= t * v[i];
        }
    }
    return {std::move(q), std::move(r), std::move(perm)};
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD.
// ---------------------------------------------------------------------------

namespace {

// Fills column `j` of u with a unit vector orthogonal to columns [0, j); used
// to complete the basis behind (numerically) zero singular values.
void complete_basis_column(Matrix& u, std::int64_t j) {
    const std::int64_t m = u.rows();
    for (std::int64_t cand = 0; cand < m; ++cand) {
        std::vector<double> r(static_cast<std::size_t>(m), 0.0);
        r[static_cast<std::size_t>(cand)] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (std::int64_t c = 0; c < j; ++c) {
                const double proj = kernels::dot({u.col(c), static_cast<std::size_t>(m)}, r);
                for (std::int64_t i = 0; i < m; ++i) r[static_cast<std::size_t>(i)] -= proj * u(i, c);
            }
        const double norm = std::sqrt(kernels::sum_squares_serial(r));
        if (norm > 0.5) {
            for (std::int64_t i = 0; i < m; ++i) u(i, j) = r[static_cast<std::size_t>(i)] / norm;
            return;
        }
    }
    throw NumericalError("svd: failed to complete an orthonormal basis");
}

SvdResult svd_tall(const Matrix& a, const SvdOptions& options) {
    const std::int64_t m = a.rows();
    const std::int64_t n = a.cols();
    Matrix w = a;
    Matrix v = Matrix::identity(n);

    int sweep = 0;
    for (; sweep < options.max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::int64_t i = 0; i < n - 1; ++i)
            for (std::int64_t j = i + 1; j < n; ++j) {
                double* wi = w.col(i);
                double* wj = w.col(j);
                double aii = 0.0, ajj = 0.0, aij = 0.0;
                for (std::int64_t r = 0; r < m; ++r) {
                    aii += wi[r] * wi[r];
                    ajj += wj[r] * wj[r];
                    aij += wi[r] * wj[r];
                }
                if (aii == 0.0 || ajj == 0.0) continue;
                if (std::abs(aij) <= options.pair_tol * std::sqrt(aii * ajj)) continue;
                rotated = true;
                // Jacobi rotation diagonalizing the 2x2 Gram block.
                const double zeta = (ajj - aii) / (2.0 * aij);
                const double t = std::copysign(1.0, zeta) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::int64_t r = 0; r < m; ++r) {
                    const double x = wi[r], y = wj[r];
                    wi[r] = cs * x - sn * y;
                    wj[r] = sn * x + cs * y;
                }
                double* vi = v.col(i);
                double* vj = v.col(j);
                for (std::int64_t r = 0; r < n; ++r) {
                    const double x = vi[r], y = vj[r];
                    vi[r] = cs * x - sn * y;
                    vj[r] = sn * x + cs * y;
                }
            }
        if (!rotated) break;
    }
    if (sweep == options.max_sweeps) {
        double worst = 0.0;
        for (std::int64_t i = 0; i < n - 1; ++i)
            for (std::int64_t j = i + 1; j < n; ++j) {
                const double num = std::abs(kernels::dot({w.col(i), static_cast<std::size_t>(m)},
                                                         {w.col(j), static_cast<std::size_t>(m)}));
                const double den =
                    std::sqrt(kernels::sum_squares_serial({w.col(i), static_cast<std::size_t>(m)}) *
                              kernels::sum_squares_serial({w.col(j), static_cast<std::size_t>(m)}));
                if (den > 0.0) worst = std::max(worst, num / den);
            }
        throw NumericalError(fmt::format(
            "svd: one-sided Jacobi did not converge in {} sweeps (worst pair cosine {:.3e})",
            options.max_sweeps, worst));
    }

    std::vector<double> s(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t j = 0; j < n; ++j)
        s[static_cast<std::size_t>(j)] =
            std::sqrt(kernels::sum_squares_serial({w.col(j), static_cast<std::size_t>(m)}));

    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::int64_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t x, std::int64_t y) {
        return s[static_cast<std::size_t>(x)] > s[static_cast<std::size_t>(y)];
    });

    SvdResult out;
    out.u = Matrix(m, n);
    out.v = Matrix(n, n);
    out.s.resize(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        const std::int64_t src = order[static_cast<std::size_t>(j)];
        const double sj = s[static_cast<std::size_t>(src)];
        out.s[static_cast<std::size_t>(j)] = sj;
        for (std::int64_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
        if (sj > 0.0) {
            // Every entry is bounded by the column norm, so this cannot overflow,
            // and converged pairs are orthogonal relative to their norms.
            for (std::int64_t i = 0; i < m; ++i) out.u(i, j) = w(i, src) / sj;
        } else {
            complete_basis_column(out.u, j);
        }
    }
    return out;
}

}  // namespace

SvdResult svd(const Matrix& a, const SvdOptions& options) {
    if (a.rows() == 0 || a.cols() == 0) throw ArgumentError("svd: empty matrix");
    if (a.rows() >= a.cols()) return svd_tall(a, options);
    SvdResult t = svd_tall(kernels::transpose(a), options);
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
}

// ---------------------------------------------------------------------------
// UTV via alternating column-pivoted QR passes.
// ---------------------------------------------------------------------------

namespace {

// Running factorization A = U * M * V^T. Either side may still be a bare
// permutation from the first pass; it is materialized lazily.
struct UtvState {
    Matrix u;                          // dense, or empty if perm_u is active
    std::vector<std::int64_t> perm_u;  // row r of imaginary U is e_{perm_u}... see apply
    Matrix v;
    std::vector<std::int64_t> perm_v;
    Matrix middle;
    bool lower = false;
};

// out(perm[j], :) = q(j, :), i.e. the permutation that sent source column
// perm[j] to position j, applied from the left.
Matrix permute_rows_from(const Matrix& q, const std::vector<std::int64_t>& perm) {
    Matrix out(q.rows(), q.cols());
    for (std::int64_t j = 0; j < q.rows(); ++j) {
        const std::int64_t dst = perm[static_cast<std::size_t>(j)];
        for (std::int64_t c = 0; c < q.cols(); ++c) out(dst, c) = q(j, c);
    }
    return out;
}

Matrix select_columns(const Matrix& u, const std::vector<std::int64_t>& perm, std::int64_t count) {
    Matrix out(u.rows(), count);
    for (std::int64_t j = 0; j < count; ++j) {
        const std::int64_t src = perm[static_cast<std::size_t>(j)];
        for (std::int64_t i = 0; i < u.rows(); ++i) out(i, j) = u(i, src);
    }
    return out;
}

// Identity columns reordered so that column j is e_{perm[j]}.
Matrix materialize_perm(const std::vector<std::int64_t>& perm, std::int64_t rows, std::int64_t cols) {
    Matrix out(rows, cols);
    for (std::int64_t j = 0; j < cols; ++j) out(perm[static_cast<std::size_t>(j)], j) = 1.0;
    return out;
}

void compose_u_with_q(UtvState& st, const Matrix& q) {
    if (!st.perm_u.empty()) {
        st.u = permute_rows_from(q, st.perm_u);
        st.perm_u.clear();
    } else {
        st.u = kernels::matmul(st.u, q);
    }
}

void compose_u_with_perm(UtvState& st, const std::vector<std::int64_t>& perm, std::int64_t count) {
    if (!st.perm_u.empty()) {
        std::vector<std::int64_t> comp(static_cast<std::size_t>(count));
        for (std::int64_t j = 0; j < count; ++j)
            comp[static_cast<std::size_t>(j)] = st.perm_u[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
        st.perm_u = std::move(comp);
    } else {
        st.u = select_columns(st.u, perm, count);
    }
}

void compose_v_with_q(UtvState& st, const Matrix& q) {
    if (!st.perm_v.empty()) {
        st.v = permute_rows_from(q, st.perm_v);
        st.perm_v.clear();
    } else {
        st.v = kernels::matmul(st.v, q);
    }
}

void compose_v_with_perm(UtvState& st, const std::vector<std::int64_t>& perm, std::int64_t count) {
    if (!st.perm_v.empty()) {
        std::vector<std::int64_t> comp(static_cast<std::size_t>(count));
        for (std::int64_t j = 0; j < count; ++j)
            comp[static_cast<std::size_t>(j)] = st.perm_v[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
        st.perm_v = std::move(comp);
    } else {
        st.v = select_columns(st.v, perm, count);
    }
}

// M = Q R P^T  =>  A = (U Q) R (V P)^T: middle becomes upper-triangular.
// Only ever called with M either square or tall (m x p), so R is p x p.
void flip_to_upper(UtvState& st) {
    QrPivotResult f = qr_col_pivot(st.middle);
    const std::int64_t p = f.r.rows();
    compose_u_with_q(st, f.q);
    compose_v_with_perm(st, f.perm, p);
    Matrix square(p, p);
    for (std::int64_t j = 0; j < p; ++j)
        for (std::int64_t i = 0; i <= j; ++i) square(i, j) = f.r(i, j);
    st.middle = std::move(square);
    st.lower = false;
}

// M^T = Q R P^T  =>  M = P R^T Q^T, A = (U P) R^T (V Q)^T: middle lower-triangular.
void flip_to_lower(UtvState& st) {
    QrPivotResult f = qr_col_pivot(kernels::transpose(st.middle));
    const std::int64_t p = f.r.rows();
    compose_u_with_perm(st, f.perm, p);
    compose_v_with_q(st, f.q);
    Matrix lower(p, p);
    for (std::int64_t j = 0; j < p; ++j)
        for (std::int64_t i = 0; i <= j; ++i) lower(j, i) = f.r(i, j);
    st.middle = std::move(lower);
    st.lower = true;
}

// Builds A = U T V^T with T p x p triangular of the requested orientation
// using `passes` column-pivoted QR factorizations in total.
UtvState utv_engine(const Matrix& a, bool want_lower, int passes) {
    const std::int64_t m = a.rows();
    const std::int64_t n = a.cols();
    if (m == 0 || n == 0) throw ArgumentError("utv: empty matrix");
    const std::int64_t p = std::min(m, n);

    // Single-pass parity: starting from A ends upper, from A^T ends lower.
    // Each later pass flips, so the start side is fixed by pass count parity.
    bool start_direct = want_lower ? (passes % 2 == 0) : (passes % 2 == 1);
    // A lone pass only yields a square middle factor on the matching shape;
    // force one structural extra pass otherwise.
    if (passes == 1) {
        if (start_direct && m < n) {
            passes = 2;
            start_direct = false;
        } else if (!start_direct && m > n) {
            passes = 2;
            start_direct = true;
        }
    }

    UtvState st;
    if (start_direct) {
        QrPivotResult f = qr_col_pivot(a);
        st.u = std::move(f.q);
        st.perm_v = std::move(f.perm);
        st.middle = std::move(f.r);  // p x n upper (trapezoidal when p < n)
        st.lower = false;
    } else {
        QrPivotResult f = qr_col_pivot(kernels::transpose(a));
        st.perm_u = std::move(f.perm);
        st.v = std::move(f.q);
        st.middle = kernels::transpose(f.r);  // m x p lower (trapezoidal when p < m)
        st.lower = true;
    }

    for (int pass = 1; pass < passes; ++pass) {
        if (st.lower)
            flip_to_upper(st);
        else
            flip_to_lower(st);
    }

    // Materialize any side still carried as a permutation (happens only in the
    // genuinely single-pass case, where that side is square).
    if (!st.perm_u.empty()) {
        st.u = materialize_perm(st.perm_u, m, p);
        st.perm_u.clear();
    }
    if (!st.perm_v.empty()) {
        st.v = materialize_perm(st.perm_v, n, p);
        st.perm_v.clear();
    }
    return st;
}

int checked_passes(int refine_passes) {
    if (refine_passes < 0) throw ArgumentError("refine_passes must be >= 0");
    if (refine_passes > 64) throw ArgumentError("refine_passes is unreasonably large");
    return refine_passes + 1;
}

}  // namespace

UlvFactors ulv(const Matrix& a, int refine_passes) {
    UtvState st = utv_engine(a, /*want_lower=*/true, checked_passes(refine_passes));
    return {std::move(st.u), std::move(st.middle), std::move(st.v)};
}

UrvFactors urv(const Matrix& a, int refine_passes) {
    UtvState st = utv_engine(a, /*want_lower=*/false, checked_passes(refine_passes));
    return {std::move(st.u), std::move(st.middle), std::move(st.v)};
}

// ---------------------------------------------------------------------------
// Truncation. The residual is accounted as the exact sum of squares of the
// discarded middle-factor entries, which equals |A|_F^2 - |T11|_F^2 because
// the discarded part is orthogonal to the kept one on one side.
// ---------------------------------------------------------------------------

namespace {

Matrix leading_columns(const Matrix& a, std::int64_t count) {
    Matrix out(a.rows(), count);
    std::copy(a.data(), a.data() + a.rows() * count, out.data());
    return out;
}

Matrix leading_block(const Matrix& a, std::int64_t rows, std::int64_t cols) {
    Matrix out(rows, cols);
    for (std::int64_t j = 0; j < cols; ++j)
        std::copy(a.col(j), a.col(j) + rows, out.col(j));
    return out;
}

void check_rank(std::int64_t rank, std::int64_t p) {
    if (rank < 1 || rank > p)
        throw ArgumentError(fmt::format("rank {} out of range 1..{}", rank, p));
}

// Cumulative squared Frobenius mass of the leading r x r block, r = 0..p.
// Lower-triangular middles grow row by row, upper ones column by column, so
// each step adds the entries of one row/column inside the leading block.
std::vector<double> kept_mass_lower(const Matrix& l) {
    const std::int64_t p = l.rows();
    std::vector<double> kept(static_cast<std::size_t>(p) + 1, 0.0);
    for (std::int64_t r = 1; r <= p; ++r) {
        double row = 0.0;
        for (std::int64_t j = 0; j < r; ++j) row += l(r - 1, j) * l(r - 1, j);
        kept[static_cast<std::size_t>(r)] = kept[static_cast<std::size_t>(r - 1)] + row;
    }
    return kept;
}

std::vector<double> kept_mass_upper(const Matrix& r) {
    const std::int64_t p = r.rows();
    std::vector<double> kept(static_cast<std::size_t>(p) + 1, 0.0);
    for (std::int64_t c = 1; c <= p; ++c) {
        double col = 0.0;
        for (std::int64_t i = 0; i < c; ++i) col += r(i, c - 1) * r(i, c - 1);
        kept[static_cast<std::size_t>(c)] = kept[static_cast<std::size_t>(c - 1)] + col;
    }
    return kept;
}

std::vector<double> kept_mass_diag(const std::vector<double>& s) {
    std::vector<double> kept(s.size() + 1, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) kept[i + 1] = kept[i] + s[i] * s[i];
    return kept;
}

double residual_from_mass(const std::vector<double>& kept, std::int64_t rank) {
    const double disc = kept.back() - kept[static_cast<std::size_t>(rank)];
    return std::sqrt(std::max(0.0, disc));
}

std::int64_t pick_rank(const std::vector<double>& kept, double eps) {
    if (eps < 0.0) throw ArgumentError("tolerance must be >= 0");
    const std::int64_t p = static_cast<std::int64_t>(kept.size()) - 1;
    if (eps == 0.0) return p;
    const double target = kept.back() - eps * eps;
    for (std::int64_t r = 1; r < p; ++r)
        if (kept[static_cast<std::size_t>(r)] >= target) return r;
    return p;
}

Matrix diag_matrix(const std::vector<double>& s, std::int64_t rank) {
    Matrix d(rank, rank);
    for (std::int64_t i = 0; i < rank; ++i) d(i, i) = s[static_cast<std::size_t>(i)];
    return d;
}

}  // namespace

TruncatedFactorization truncate_fixed_rank(const SvdResult& f, std::int64_t rank) {
    const std::int64_t p = static_cast<std::int64_t>(f.s.size());
    check_rank(rank, p);
    const auto kept = kept_mass_diag(f.s);
    return {FactorKind::svd, rank, leading_columns(f.u, rank), diag_matrix(f.s, rank),
            leading_columns(f.v, rank), residual_from_mass(kept, rank)};
}

TruncatedFactorization truncate_fixed_rank(const UlvFactors& f, std::int64_t rank) {
    check_rank(rank, f.l.rows());
    const auto kept = kept_mass_lower(f.l);
    return {FactorKind::ulv, rank, leading_columns(f.u, rank), leading_block(f.l, rank, rank),
            leading_columns(f.v, rank), residual_from_mass(kept, rank)};
}

TruncatedFactorization truncate_fixed_rank(const UrvFactors& f, std::int64_t rank) {
    check_rank(rank, f.r.rows());
    const auto kept = kept_mass_upper(f.r);
    return {FactorKind::urv, rank, leading_columns(f.u, rank), leading_block(f.r, rank, rank),
            leading_columns(f.v, rank), residual_from_mass(kept, rank)};
}

TruncatedFactorization truncate_fixed_tol(const SvdResult& f, double eps) {
    return truncate_fixed_rank(f, pick_rank(kept_mass_diag(f.s), eps));
}

TruncatedFactorization truncate_fixed_tol(const UlvFactors& f, double eps) {
    return truncate_fixed_rank(f, pick_rank(kept_mass_lower(f.l), eps));
}

TruncatedFactorization truncate_fixed_tol(const UrvFactors& f, double eps) {
    return truncate_fixed_rank(f, pick_rank(kept_mass_upper(f.r), eps));
}

// ---------------------------------------------------------------------------
// Rank-revelation diagnostics.
// ---------------------------------------------------------------------------

namespace {

RankRevealDiag diag_impl(const Matrix& t, std::int64_t rank, bool lower) {
    const std::int64_t p = t.rows();
    check_rank(rank, p);
    RankRevealDiag out;
    {
        const SvdResult f = svd(leading_block(t, rank, rank));
        out.sigma_min_t11 = f.s.back();
    }
    if (rank < p) {
        // Discarded block: rows below the leading block (lower) or columns to
        // its right (upper), spanning the full middle factor.
        Matrix disc = lower ? Matrix(p - rank, p) : Matrix(p, p - rank);
        if (lower) {
            for (std::int64_t j = 0; j < p; ++j)
                for (std::int64_t i = rank; i < p; ++i) disc(i - rank, j) = t(i, j);
        } else {
            for (std::int64_t j = rank; j < p; ++j)
                for (std::int64_t i = 0; i < p; ++i) disc(i, j - rank) = t(i, j);
        }
        out.residual_spectral_norm = svd(disc).s.front();
    }
    const SvdResult full = svd(t);
    out.sigma_r = full.s[static_cast<std::size_t>(rank - 1)];
    out.sigma_r_plus_1 = rank < p ? full.s[static_cast<std::size_t>(rank)] : 0.0;
    return out;
}

}  // namespace

RankRevealDiag rank_reveal_diag(const UlvFactors& f, std::int64_t rank) {
    return diag_impl(f.l, rank, /*lower=*/true);
}

RankRevealDiag rank_reveal_diag(const UrvFactors& f, std::int64_t rank) {
    return diag_impl(f.r, rank, /*lower=*/false);
}

}  // namespace ttutv
