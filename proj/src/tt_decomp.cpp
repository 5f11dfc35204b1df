#include "ttutv/tt_decomp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "ttutv/factor.hpp"
#include "ttutv/kernels.hpp"
#include "ttutv/tensor_ops.hpp"

namespace ttutv {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Per-run resolution of the rank/tolerance mode against the input order.
struct ResolvedMode {
    bool fixed_rank = false;
    std::vector<std::int64_t> ranks;  // full chain, length d+1
    std::vector<double> budgets;      // absolute eps per cut, length d-1
};

ResolvedMode resolve_mode(const DecompConfig& cfg, std::int64_t d, double norm_a, BoundKind bk) {
    const std::int64_t cuts = d - 1;
    ResolvedMode out;
    if (const auto* fr = std::get_if<FixedRank>(&cfg.mode)) {
        out.fixed_rank = true;
        if (static_cast<std::int64_t>(fr->ranks.size()) != d + 1)
            throw ArgumentError(fmt::format("rank chain has {} entries, expected {}", fr->ranks.size(),
                                            d + 1));
        if (fr->ranks.front() != 1 || fr->ranks.back() != 1)
            throw ArgumentError("boundary ranks must both be 1");
        for (std::int64_t r : fr->ranks)
            if (r < 1) throw ArgumentError("ranks must be >= 1");
        out.ranks = fr->ranks;
        return out;
    }
    const auto& ft = std::get<FixedTol>(cfg.mode);
    if (ft.eps < 0.0) throw ArgumentError("tolerance must be >= 0");
    std::vector<double> weights = ft.weights;
    if (weights.empty()) {
        const double w = bk == BoundKind::root_sum_square
                             ? 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(cuts, 1)))
                             : 1.0 / static_cast<double>(std::max<std::int64_t>(cuts, 1));
        weights.assign(static_cast<std::size_t>(cuts), w);
    } else {
        if (static_cast<std::int64_t>(weights.size()) != cuts)
            throw ArgumentError(fmt::format("{} weights given, expected {}", weights.size(), cuts));
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw ArgumentError("weights must be >= 0");
            total += bk == BoundKind::root_sum_square ? w * w : w;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ArgumentError(bk == BoundKind::root_sum_square
                                    ? "squared weights must sum to 1"
                                    : "weights must sum to 1");
    }
    out.budgets.reserve(static_cast<std::size_t>(cuts));
    for (double w : weights) out.budgets.push_back(w * ft.eps * norm_a);
    return out;
}

TTCore core_from_right_unfolding(Matrix u1, std::int64_t r_prev, std::int64_t mode, std::int64_t r) {
    return TTCore{DenseTensor(Shape({r_prev, mode, r}), u1.take_storage())};
}

TTCore core_from_left_unfolding(const Matrix& v1, std::int64_t r, std::int64_t mode, std::int64_t r_next) {
    Matrix v1t = kernels::transpose(v1);  // r x (mode * r_next), matches the core layout
    return TTCore{DenseTensor(Shape({r, mode, r_next}), v1t.take_storage())};
}

double frob_diff(const Matrix& x, const Matrix& y) {
    double sum = 0.0;
    for (std::int64_t i = 0; i < x.size(); ++i) {
        const double d = x.data()[i] - y.data()[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void debug_carry_check(const Matrix& carry, const Matrix& reference, double scale,
                       const char* where) {
    const double dev = frob_diff(carry, reference);
    if (dev > 1e-10 * scale)
        throw InvariantError(fmt::format(
            "{}: carried matrix deviates from the projected previous one by {:.3e} (allowed {:.3e})",
            where, dev, 1e-10 * scale));
}

// Column-cumulative squared mass of the middle factor, used by the
// full-column retain mode where the kept part is L(:, 1..r).
std::vector<double> column_mass(const Matrix& l) {
    std::vector<double> kept(static_cast<std::size_t>(l.cols()) + 1, 0.0);
    for (std::int64_t j = 0; j < l.cols(); ++j)
        kept[static_cast<std::size_t>(j) + 1] =
            kept[static_cast<std::size_t>(j)] +
            kernels::sum_squares_serial({l.col(j), static_cast<std::size_t>(l.rows())});
    return kept;
}

struct SweepOutcome {
    std::vector<TTCore> cores;
    DecompReport report;
};

DecompResult finish(SweepOutcome&& out, BoundKind bk, Clock::time_point start) {
    double bound = 0.0;
    for (double e : out.report.step_errors)
        bound += bk == BoundKind::root_sum_square ? e * e : e;
    out.report.bound = bk == BoundKind::root_sum_square ? std::sqrt(bound) : bound;
    out.report.bound_kind = bk;
    out.report.wall_time_ms = elapsed_ms(start);
    return {TTTensor(std::move(out.cores)), std::move(out.report)};
}

DecompResult zero_input_result(const DenseTensor& a, const ResolvedMode& mode, BoundKind bk,
                               Clock::time_point start) {
    SweepOutcome out;
    const std::int64_t d = a.order();
    out.report.step_errors.assign(static_cast<std::size_t>(std::max<std::int64_t>(d - 1, 0)), 0.0);
    out.report.ranks_chosen.assign(static_cast<std::size_t>(d) + 1, 1);
    out.report.input_norm = 0.0;
    if (mode.fixed_rank) {
        out.report.ranks_requested = mode.ranks;
        if (*std::max_element(mode.ranks.begin(), mode.ranks.end()) > 1)
            out.report.warnings.push_back("input tensor is zero; all ranks clamped to 1");
    }
    TTTensor zero = zero_tt(a.shape());
    std::vector<TTCore> cores(zero.cores().begin(), zero.cores().end());
    out.cores = std::move(cores);
    return finish(std::move(out), bk, start);
}

DecompResult order_one_result(const DenseTensor& a, double norm_a, Clock::time_point start,
                              BoundKind bk) {
    SweepOutcome out;
    out.report.ranks_chosen = {1, 1};
    out.report.input_norm = norm_a;
    out.cores.push_back(TTCore{DenseTensor(Shape({1, a.shape().dim(1), 1}), a.storage())});
    return finish(std::move(out), bk, start);
}

// Left-to-right sweep (svd or ulv): repeatedly truncates the current carry
// reshaped to (r_{k-1} I_k) x (I_{k+1}...I_d), emitting the column-orthonormal
// factor as core k and carrying T11 V1^T.
DecompResult sweep_l2r(const DenseTensor& a, const DecompConfig& cfg, BoundKind bk) {
    const auto start = Clock::now();
    const Shape& shape = a.shape();
    const std::int64_t d = shape.order();
    const double norm_a = frobenius_norm(a);
    const ResolvedMode mode = resolve_mode(cfg, d, norm_a, bk);
    if (norm_a == 0.0) return zero_input_result(a, mode, bk, start);
    if (d == 1) return order_one_result(a, norm_a, start, bk);

    SweepOutcome out;
    out.report.input_norm = norm_a;
    out.report.step_errors.assign(static_cast<std::size_t>(d - 1), 0.0);
    out.report.ranks_chosen.assign(static_cast<std::size_t>(d) + 1, 1);
    if (mode.fixed_rank) out.report.ranks_requested = mode.ranks;

    Matrix c(shape.dim(1), shape.element_count() / shape.dim(1), a.storage());
    std::int64_t r_prev = 1;
    for (std::int64_t k = 1; k <= d - 1; ++k) {
        const std::int64_t p = std::min(c.rows(), c.cols());
        TruncatedFactorization tf;
        if (mode.fixed_rank) {
            const std::int64_t req = mode.ranks[static_cast<std::size_t>(k)];
            const std::int64_t r = std::min(req, p);
            if (r < req)
                out.report.warnings.push_back(
                    fmt::format("cut {}: requested rank {} clamped to {}", k, req, r));
            tf = cfg.method == Method::svd ? truncate_fixed_rank(svd(c), r)
                                           : truncate_fixed_rank(ulv(c, cfg.refine_passes), r);
        } else {
            const double budget = mode.budgets[static_cast<std::size_t>(k - 1)];
            tf = cfg.method == Method::svd ? truncate_fixed_tol(svd(c), budget)
                                           : truncate_fixed_tol(ulv(c, cfg.refine_passes), budget);
        }
        out.report.step_errors[static_cast<std::size_t>(k - 1)] = tf.residual_norm;
        out.report.ranks_chosen[static_cast<std::size_t>(k)] = tf.rank;

        Matrix carry = kernels::matmul(tf.t11, tf.v1, false, true);
        if (cfg.debug_checks) {
            const Matrix ref = kernels::matmul(tf.u1, c, true, false);
            debug_carry_check(carry, ref, frobenius_norm(c), "left-to-right sweep");
        }
        out.cores.push_back(
            core_from_right_unfolding(std::move(tf.u1), r_prev, shape.dim(k), tf.rank));
        r_prev = tf.rank;

        if (k < d - 1) {
            const std::int64_t next_rows = r_prev * shape.dim(k + 1);
            const std::int64_t next_cols = carry.cols() / shape.dim(k + 1);
            c = Matrix(next_rows, next_cols, carry.take_storage());
        } else {
            out.cores.push_back(TTCore{
                DenseTensor(Shape({r_prev, shape.dim(d), 1}), carry.take_storage())});
        }
    }
    return finish(std::move(out), bk, start);
}

// Right-to-left sweep (svd, urv, or ulv with a retain policy): truncates the
// carry reshaped to (I_1...I_{k-1}) x (I_k r_k), emitting the row-orthonormal
// factor V1^T as core k and carrying the left part.
DecompResult sweep_r2l(const DenseTensor& a, const DecompConfig& cfg, BoundKind bk) {
    const auto start = Clock::now();
    const Shape& shape = a.shape();
    const std::int64_t d = shape.order();
    const double norm_a = frobenius_norm(a);
    const ResolvedMode mode = resolve_mode(cfg, d, norm_a, bk);
    if (norm_a == 0.0) return zero_input_result(a, mode, bk, start);
    if (d == 1) return order_one_result(a, norm_a, start, bk);

    SweepOutcome out;
    out.report.input_norm = norm_a;
    out.report.step_errors.assign(static_cast<std::size_t>(d - 1), 0.0);
    out.report.ranks_chosen.assign(static_cast<std::size_t>(d) + 1, 1);
    if (mode.fixed_rank) out.report.ranks_requested = mode.ranks;

    std::vector<TTCore> rev_cores;  // cores d, d-1, ..., 2
    Matrix c(shape.element_count() / shape.dim(d), shape.dim(d), a.storage());
    std::int64_t r_next = 1;
    for (std::int64_t k = d; k >= 2; --k) {
        const std::int64_t p = std::min(c.rows(), c.cols());
        std::int64_t r = 0;
        Matrix carry, v1;
        double step_err = 0.0;

        const bool full_column = cfg.method == Method::ulv && cfg.retain == Retain::full_column;
        if (full_column) {
            const UlvFactors f = ulv(c, cfg.refine_passes);
            const std::vector<double> kept = column_mass(f.l);
            if (mode.fixed_rank) {
                const std::int64_t req = mode.ranks[static_cast<std::size_t>(k - 1)];
                r = std::min(req, p);
                if (r < req)
                    out.report.warnings.push_back(
                        fmt::format("cut {}: requested rank {} clamped to {}", k - 1, req, r));
            } else {
                const double budget = mode.budgets[static_cast<std::size_t>(k - 2)];
                r = p;
                if (budget > 0.0) {
                    const double target = kept.back() - budget * budget;
                    for (std::int64_t cand = 1; cand < p; ++cand)
                        if (kept[static_cast<std::size_t>(cand)] >= target) {
                            r = cand;
                            break;
                        }
                }
            }
            step_err = std::sqrt(std::max(0.0, kept.back() - kept[static_cast<std::size_t>(r)]));
            Matrix l_left(f.l.rows(), r);
            std::copy(f.l.data(), f.l.data() + f.l.rows() * r, l_left.data());
            carry = kernels::matmul(f.u, l_left);
            v1 = Matrix(f.v.rows(), r);
            std::copy(f.v.data(), f.v.data() + f.v.rows() * r, v1.data());
            if (cfg.debug_checks)
                debug_carry_check(carry, kernels::matmul(c, v1), frobenius_norm(c),
                                  "right-to-left sweep (full column)");
        } else {
            TruncatedFactorization tf;
            double l21_norm = 0.0;  // only meaningful for the l11-only ULV path
            auto resolve_rank = [&](auto&& factors) {
                if (mode.fixed_rank) {
                    const std::int64_t req = mode.ranks[static_cast<std::size_t>(k - 1)];
                    const std::int64_t rr = std::min(req, p);
                    if (rr < req)
                        out.report.warnings.push_back(
                            fmt::format("cut {}: requested rank {} clamped to {}", k - 1, req, rr));
                    return truncate_fixed_rank(factors, rr);
                }
                return truncate_fixed_tol(factors, mode.budgets[static_cast<std::size_t>(k - 2)]);
            };
            if (cfg.method == Method::svd) {
                tf = resolve_rank(svd(c));
            } else if (cfg.method == Method::urv) {
                tf = resolve_rank(urv(c, cfg.refine_passes));
            } else {
                const UlvFactors f = ulv(c, cfg.refine_passes);
                tf = resolve_rank(f);
                if (cfg.debug_checks) {
                    const std::vector<double> col_kept = column_mass(f.l);
                    const double l22_sq =
                        col_kept.back() - col_kept[static_cast<std::size_t>(tf.rank)];
                    l21_norm = std::sqrt(
                        std::max(0.0, tf.residual_norm * tf.residual_norm - l22_sq));
                }
            }
            r = tf.rank;
            step_err = tf.residual_norm;
            carry = kernels::matmul(tf.u1, tf.t11);
            v1 = std::move(tf.v1);
            if (cfg.debug_checks) {
                const Matrix ref = kernels::matmul(c, v1);
                if (cfg.method == Method::ulv) {
                    // The discarded coupling block is exactly what the carried
                    // matrix misses relative to the projected previous one.
                    const double dev = frob_diff(carry, ref);
                    if (std::abs(dev - l21_norm) > 1e-10 * frobenius_norm(c))
                        throw InvariantError(fmt::format(
                            "right-to-left sweep: carry deviation {:.3e} != coupling norm {:.3e}",
                            dev, l21_norm));
                } else {
                    debug_carry_check(carry, ref, frobenius_norm(c), "right-to-left sweep");
                }
            }
        }

        out.report.step_errors[static_cast<std::size_t>(k - 2)] = step_err;
        out.report.ranks_chosen[static_cast<std::size_t>(k - 1)] = r;
        rev_cores.push_back(core_from_left_unfolding(v1, r, shape.dim(k), r_next));
        r_next = r;

        if (k > 2) {
            const std::int64_t next_rows = carry.rows() / shape.dim(k - 1);
            c = Matrix(next_rows, shape.dim(k - 1) * r, carry.take_storage());
        } else {
            rev_cores.push_back(TTCore{
                DenseTensor(Shape({1, shape.dim(1), r}), carry.take_storage())});
        }
    }

    SweepOutcome ordered;
    ordered.report = std::move(out.report);
    ordered.cores.assign(std::make_move_iterator(rev_cores.rbegin()),
                         std::make_move_iterator(rev_cores.rend()));
    return finish(std::move(ordered), bk, start);
}

BoundKind bound_kind_for(const DecompConfig& cfg) {
    if (cfg.method == Method::ulv && cfg.sweep == Sweep::right_to_left &&
        cfg.retain == Retain::l11_only)
        return BoundKind::plain_sum;
    return BoundKind::root_sum_square;
}

}  // namespace

DecompResult tt_svd(const DenseTensor& a, const DecompConfig& config) {
    DecompConfig cfg = config;
    cfg.method = Method::svd;
    return cfg.sweep == Sweep::left_to_right ? sweep_l2r(a, cfg, BoundKind::root_sum_square)
                                             : sweep_r2l(a, cfg, BoundKind::root_sum_square);
}

DecompResult tt_ulv_fixed_rank_l2r(const DenseTensor& a, const std::vector<std::int64_t>& ranks,
                                   int refine_passes) {
    DecompConfig cfg;
    cfg.method = Method::ulv;
    cfg.sweep = Sweep::left_to_right;
    cfg.mode = FixedRank{ranks};
    cfg.refine_passes = refine_passes;
    return sweep_l2r(a, cfg, BoundKind::root_sum_square);
}

DecompResult tt_ulv_fixed_tol_l2r(const DenseTensor& a, double eps,
                                  const std::vector<double>& weights, int refine_passes) {
    DecompConfig cfg;
    cfg.method = Method::ulv;
    cfg.sweep = Sweep::left_to_right;
    cfg.mode = FixedTol{eps, weights};
    cfg.refine_passes = refine_passes;
    return sweep_l2r(a, cfg, BoundKind::root_sum_square);
}

DecompResult tt_urv_fixed_rank_r2l(const DenseTensor& a, const std::vector<std::int64_t>& ranks,
                                   int refine_passes) {
    DecompConfig cfg;
    cfg.method = Method::urv;
    cfg.sweep = Sweep::right_to_left;
    cfg.mode = FixedRank{ranks};
    cfg.refine_passes = refine_passes;
    return sweep_r2l(a, cfg, BoundKind::root_sum_square);
}

DecompResult tt_urv_fixed_tol_r2l(const DenseTensor& a, double eps,
                                  const std::vector<double>& weights, int refine_passes) {
    DecompConfig cfg;
    cfg.method = Method::urv;
    cfg.sweep = Sweep::right_to_left;
    cfg.mode = FixedTol{eps, weights};
    cfg.refine_passes = refine_passes;
    return sweep_r2l(a, cfg, BoundKind::root_sum_square);
}

DecompResult tt_ulv_fixed_rank_r2l(const DenseTensor& a, const std::vector<std::int64_t>& ranks,
                                   Retain retain, int refine_passes) {
    DecompConfig cfg;
    cfg.method = Method::ulv;
    cfg.sweep = Sweep::right_to_left;
    cfg.mode = FixedRank{ranks};
    cfg.retain = retain;
    cfg.refine_passes = refine_passes;
    return sweep_r2l(a, cfg, bound_kind_for(cfg));
}

DecompResult left_orthogonal_via_urv(const DenseTensor& a, const DecompConfig& config) {
    DecompConfig cfg = config;
    cfg.method = Method::urv;
    cfg.sweep = Sweep::right_to_left;
    if (auto* fr = std::get_if<FixedRank>(&cfg.mode)) {
        std::reverse(fr->ranks.begin(), fr->ranks.end());
    } else {
        auto& ft = std::get<FixedTol>(cfg.mode);
        std::reverse(ft.weights.begin(), ft.weights.end());
    }
    DecompResult rev = sweep_r2l(reverse_indices(a), cfg, BoundKind::root_sum_square);
    DecompResult out;
    out.tt = reverse_tt(rev.tt);
    out.report = std::move(rev.report);
    std::reverse(out.report.step_errors.begin(), out.report.step_errors.end());
    std::reverse(out.report.ranks_chosen.begin(), out.report.ranks_chosen.end());
    std::reverse(out.report.ranks_requested.begin(), out.report.ranks_requested.end());
    out.report.warnings.push_back("left-orthogonal train built by sweeping the reversed tensor");
    return out;
}

DecompResult decompose(const DenseTensor& a, const DecompConfig& config) {
    switch (config.method) {
        case Method::svd:
            return tt_svd(a, config);
        case Method::ulv:
            return config.sweep == Sweep::left_to_right
                       ? sweep_l2r(a, config, BoundKind::root_sum_square)
                       : sweep_r2l(a, config, bound_kind_for(config));
        case Method::urv:
            return config.sweep == Sweep::right_to_left
                       ? sweep_r2l(a, config, BoundKind::root_sum_square)
                       : left_orthogonal_via_urv(a, config);
    }
    throw ArgumentError("unknown method");
}

double verify_bound(const DenseTensor& a, const TTTensor& tt, DecompReport& report,
                    double slack_rel, std::int64_t element_cap) {
    const DenseTensor recon = reconstruct(tt, element_cap);
    if (!(recon.shape() == a.shape())) throw ArgumentError("verify_bound: shapes differ");
    double sum = 0.0;
    for (std::int64_t i = 0; i < a.element_count(); ++i) {
        const double d = recon[i] - a[i];
        sum += d * d;
    }
    const double achieved = std::sqrt(sum);
    report.achieved_error = achieved;
    const double allowed = report.bound + slack_rel * report.input_norm;
    if (achieved > allowed)
        throw InvariantError(fmt::format(
            "achieved error {:.12e} exceeds bound {:.12e} plus slack {:.3e}", achieved,
            report.bound, slack_rel * report.input_norm));
    return achieved;
}

}  // namespace ttutv
