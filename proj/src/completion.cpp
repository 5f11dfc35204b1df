#include "ttutv/completion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttutv/kernels.hpp"
#include "ttutv/tensor_ops.hpp"

namespace ttutv {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kStopWindow = 5;
constexpr int kDivergeRun = 20;

}  // namespace

ObservationMask::ObservationMask(const Shape& shape,
                                 const std::vector<std::vector<std::int64_t>>& indices,
                                 const std::vector<double>& values)
    : shape_(shape) {
    if (indices.size() != values.size())
        throw ArgumentError("observation indices and values differ in length");
    std::vector<std::pair<std::int64_t, double>> entries;
    entries.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i)
        entries.emplace_back(ivec(indices[i], shape) - 1, values[i]);
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].first == entries[i - 1].first)
            throw ArgumentError(fmt::format("duplicate observation at linear index {}",
                                            entries[i].first + 1));
    linear_.reserve(entries.size());
    values_.reserve(entries.size());
    for (const auto& [idx, val] : entries) {
        linear_.push_back(idx);
        values_.push_back(val);
    }
    if (linear_.empty()) throw ArgumentError("observation set is empty");
}

ObservationMask::ObservationMask(const DenseTensor& indicator, const DenseTensor& values)
    : shape_(indicator.shape()) {
    if (!(indicator.shape() == values.shape()))
        throw ArgumentError("indicator and value tensors differ in shape");
    for (std::int64_t i = 0; i < indicator.element_count(); ++i)
        if (indicator[i] != 0.0) {
            linear_.push_back(i);
            values_.push_back(values[i]);
        }
    if (linear_.empty()) throw ArgumentError("observation set is empty");
}

double ObservationMask::values_norm() const {
    return std::sqrt(kernels::sum_squares(values_));
}

DenseTensor project_observed(const DenseTensor& tensor, const ObservationMask& mask) {
    if (!(tensor.shape() == mask.shape())) throw ArgumentError("project_observed: shapes differ");
    DenseTensor out{tensor.shape()};
    const auto& idx = mask.linear_indices();
    const std::int64_t n = mask.count();
#pragma omp parallel for schedule(static) if (kernels::parallel_enabled() && n > (1 << 16))
    for (std::int64_t i = 0; i < n; ++i)
        out[idx[static_cast<std::size_t>(i)]] = tensor[idx[static_cast<std::size_t>(i)]];
    return out;
}

namespace {

void check_config(const ObservationMask& mask, const Shape& shape, const CompletionConfig& config) {
    if (!(mask.shape() == shape)) throw ArgumentError("mask was built against a different shape");
    if (shape.element_count() > config.dense_cap)
        throw ResourceError(fmt::format("completion would materialize {} elements (cap {})",
                                        shape.element_count(), config.dense_cap));
    if (static_cast<std::int64_t>(config.ranks.size()) != shape.order() + 1)
        throw ArgumentError(fmt::format("rank chain has {} entries, expected {}",
                                        config.ranks.size(), shape.order() + 1));
    if (config.step_size < 0.0) throw ArgumentError("step size must be >= 0");
    if (config.max_iters < 1) throw ArgumentError("max_iters must be >= 1");
    if (config.stop_tol < 0.0) throw ArgumentError("stop_tol must be >= 0");
}

DecompConfig retraction_config(const CompletionConfig& config) {
    DecompConfig dc;
    dc.method = config.retraction;
    // Pair each factorization with its natural sweep direction.
    dc.sweep = config.retraction == Method::urv ? Sweep::right_to_left : Sweep::left_to_right;
    dc.mode = FixedRank{config.ranks};
    dc.refine_passes = config.refine_passes;
    return dc;
}

TTTensor retract(const DenseTensor& dense, const DecompConfig& dc) {
    return decompose(dense, dc).tt;
}

// Ranks may legitimately collapse only when the iterate is exactly zero.
void check_iterate_ranks(const TTTensor& tt, const std::vector<std::int64_t>& expected,
                         const DenseTensor& dense) {
    const std::vector<std::int64_t> got = tt.ranks();
    if (got == expected) return;
    const bool all_zero =
        std::all_of(dense.data(), dense.data() + dense.element_count(),
                    [](double v) { return v == 0.0; });
    if (all_zero) return;
    throw InvariantError(fmt::format("iterate left the fixed-rank set: ranks ({}) vs expected ({})",
                                     fmt::join(got, ","), fmt::join(expected, ",")));
}

}  // namespace

TTTensor initial_guess(const ObservationMask& mask, const Shape& shape,
                       const CompletionConfig& config) {
    check_config(mask, shape, config);
    DenseTensor filled{shape};
    for (std::int64_t i = 0; i < mask.count(); ++i)
        filled[mask.linear_indices()[static_cast<std::size_t>(i)]] =
            mask.values()[static_cast<std::size_t>(i)];
    return retract(filled, retraction_config(config));
}

CompletionResult complete(const ObservationMask& mask, const Shape& shape,
                          const CompletionConfig& config, const DenseTensor* truth) {
    const auto start = Clock::now();
    check_config(mask, shape, config);
    if (truth != nullptr && !(truth->shape() == shape))
        throw ArgumentError("ground truth has a different shape");

    const auto& idx = mask.linear_indices();
    const auto& vals = mask.values();
    const double observed_norm = mask.values_norm();

    // Expected chain after clamping against the unfolding sizes.
    std::vector<std::int64_t> expected = config.ranks;
    for (std::int64_t k = 1; k < shape.order(); ++k) {
        const std::int64_t left = shape.prefix_product(k);
        const std::int64_t right = shape.element_count() / left;
        expected[static_cast<std::size_t>(k)] =
            std::min(expected[static_cast<std::size_t>(k)], std::min(left, right));
    }

    const DecompConfig dc = retraction_config(config);

    CompletionResult result;
    IterationTrace& trace = result.trace;

    TTTensor x_tt = initial_guess(mask, shape, config);
    DenseTensor x = reconstruct(x_tt, config.dense_cap);
    check_iterate_ranks(x_tt, expected, x);

    int rising = 0;
    for (int iter = 1; iter <= config.max_iters; ++iter) {
        // Gradient step on the observed entries only.
        DenseTensor stepped = x;
        for (std::int64_t i = 0; i < mask.count(); ++i) {
            const std::int64_t at = idx[static_cast<std::size_t>(i)];
            stepped[at] += config.step_size * (vals[static_cast<std::size_t>(i)] - x[at]);
        }
        x_tt = retract(stepped, dc);
        x = reconstruct(x_tt, config.dense_cap);
        check_iterate_ranks(x_tt, expected, x);

        double observed_err_sq = 0.0;
        for (std::int64_t i = 0; i < mask.count(); ++i) {
            const double d = x[idx[static_cast<std::size_t>(i)]] - vals[static_cast<std::size_t>(i)];
            observed_err_sq += d * d;
        }
        const double observed_rse =
            observed_norm > 0.0 ? std::sqrt(observed_err_sq) / observed_norm
                                : std::sqrt(observed_err_sq);
        trace.rse_observed.push_back(observed_rse);
        if (truth != nullptr) {
            trace.rse_full.push_back(rse(x, *truth));
            trace.psnr.push_back(psnr(x, *truth));
        }
        trace.wall_time_ms.push_back(
            std::chrono::duration<double, std::milli>(Clock::now() - start).count());

        const std::size_t t = trace.rse_observed.size();
        if (t >= 2 && trace.rse_observed[t - 1] > trace.rse_observed[t - 2]) {
            if (++rising >= kDivergeRun) {
                trace.status = CompletionStatus::diverged;
                trace.note = fmt::format(
                    "observed error rose for {} consecutive iterations (iteration {})",
                    kDivergeRun, iter);
                break;
            }
        } else {
            rising = 0;
        }
        if (config.stop_tol > 0.0 && t >= static_cast<std::size_t>(kStopWindow) + 1) {
            const double prev = trace.rse_observed[t - 1 - kStopWindow];
            const double change = std::abs(trace.rse_observed[t - 1] - prev);
            if (change < config.stop_tol * std::max(prev, 1e-300)) {
                trace.status = CompletionStatus::converged;
                break;
            }
        }
    }
    result.tt = std::move(x_tt);
    return result;
}

}  // namespace ttutv
