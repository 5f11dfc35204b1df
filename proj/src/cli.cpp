#include "ttutv/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttutv/completion.hpp"
#include "ttutv/errors.hpp"
#include "ttutv/generators.hpp"
#include "ttutv/io.hpp"
#include "ttutv/report.hpp"
#include "ttutv/tensor_ops.hpp"
#include "ttutv/tt.hpp"
#include "ttutv/tt_decomp.hpp"

namespace ttutv {

namespace {

constexpr std::int64_t kVerifyCap = 10'000'000;

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) {
            tokens.push_back(text.substr(pos));
            return tokens;
        }
        tokens.push_back(text.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const char* flag) {
    std::vector<std::int64_t> out;
    for (const std::string& token : split_csv(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ArgumentError(fmt::format("{}: '{}' is not an integer", flag, token));
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    for (const std::string& token : split_csv(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ArgumentError(fmt::format("{}: '{}' is not a number", flag, token));
        }
    }
    return out;
}

// CLI rank lists name only the interior of the chain; the boundary 1s are implied.
std::vector<std::int64_t> chain_from_interior(const std::vector<std::int64_t>& interior,
                                              std::int64_t order, const char* flag) {
    if (static_cast<std::int64_t>(interior.size()) != order - 1)
        throw ArgumentError(fmt::format("{}: expected {} interior ranks for an order-{} tensor, got {}",
                                        flag, order - 1, order, interior.size()));
    std::vector<std::int64_t> chain;
    chain.reserve(interior.size() + 2);
    chain.push_back(1);
    chain.insert(chain.end(), interior.begin(), interior.end());
    chain.push_back(1);
    return chain;
}

Method method_from(const std::string& s) {
    if (s == "svd") return Method::svd;
    if (s == "ulv") return Method::ulv;
    return Method::urv;
}

Sweep sweep_from(const std::string& s) {
    return s == "l2r" ? Sweep::left_to_right : Sweep::right_to_left;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

DenseTensor load_tensor(const std::string& path) {
    return has_suffix(path, ".txt") ? read_tensor_text(path) : read_tensor(path);
}

std::string bound_kind_str(BoundKind kind) {
    return kind == BoundKind::plain_sum ? "sum" : "rss";
}

std::string dims_str(const Shape& shape) { return fmt::format("{}", fmt::join(shape.dims(), "x")); }

struct DecomposeArgs {
    std::string in_path;
    std::string method = "ulv";
    std::string sweep = "l2r";
    std::string ranks_text;
    double eps = -1.0;
    std::string weights_text;
    int refine = 1;
    std::string retain = "l11";
    std::string out_path;
    std::string report_path;
    bool no_verify = false;
    bool debug_checks = false;
};

void run_decompose(const DecomposeArgs& args, bool eps_given, bool retain_given) {
    const DenseTensor a = load_tensor(args.in_path);
    const bool ranks_given = !args.ranks_text.empty();
    if (ranks_given == eps_given)
        throw ArgumentError("decompose: pass exactly one of --ranks and --eps");

    DecompConfig config;
    config.method = method_from(args.method);
    config.sweep = sweep_from(args.sweep);
    config.refine_passes = args.refine;
    config.debug_checks = args.debug_checks;
    if (retain_given && !(config.method == Method::ulv && config.sweep == Sweep::right_to_left))
        throw ArgumentError("decompose: --retain only applies to --method ulv --sweep r2l");
    config.retain = args.retain == "full" ? Retain::full_column : Retain::l11_only;
    if (ranks_given) {
        config.mode =
            FixedRank{chain_from_interior(parse_int_list(args.ranks_text, "--ranks"), a.order(), "--ranks")};
    } else {
        FixedTol tol;
        tol.eps = args.eps;
        if (!args.weights_text.empty()) tol.weights = parse_double_list(args.weights_text, "--weights");
        config.mode = std::move(tol);
    }

    if (config.method == Method::ulv && config.sweep == Sweep::right_to_left) {
        if (config.retain == Retain::l11_only)
            fmt::print(stderr,
                       "note: right-to-left ULV keeps only the triangular block per step; its error "
                       "bound is the plain sum of the step errors, looser than the root-sum-square "
                       "bound of the other sweeps (pass --retain full to restore it)\n");
        else
            fmt::print(stderr,
                       "note: right-to-left ULV carrying full column blocks; the root-sum-square "
                       "bound applies\n");
    }
    if (config.method == Method::urv && config.sweep == Sweep::left_to_right)
        fmt::print(stderr,
                   "note: left-to-right URV runs the right-to-left sweep on the index-reversed "
                   "tensor; the cores come out left-orthogonal\n");

    DecompResult result = decompose(a, config);
    if (!args.no_verify && a.element_count() <= kVerifyCap)
        verify_bound(a, result.tt, result.report);

    for (const std::string& warning : result.report.warnings)
        fmt::print(stderr, "warning: {}\n", warning);
    std::string achieved = "not verified";
    if (result.report.achieved_error) {
        achieved = fmt::format("achieved {:.6g}", *result.report.achieved_error);
        if (result.report.input_norm > 0.0)
            achieved += fmt::format(" (rse {:.6g})", *result.report.achieved_error / result.report.input_norm);
    }
    fmt::print("decompose {} {}: dims {}, ranks {}, bound {:.6g} ({}), {}, {:.3f} ms\n", args.method,
               args.sweep, dims_str(a.shape()), fmt::join(result.report.ranks_chosen, "x"),
               result.report.bound, bound_kind_str(result.report.bound_kind), achieved,
               result.report.wall_time_ms);

    if (!args.out_path.empty()) write_tt(args.out_path, result.tt);
    if (!args.report_path.empty()) {
        ReportRow row;
        row.method = args.method;
        row.sweep = args.sweep;
        row.mode = ranks_given ? "fixed_rank" : "fixed_tol";
        row.ranks = result.report.ranks_chosen;
        if (eps_given) row.eps = args.eps;
        row.bound = result.report.bound;
        row.bound_kind = bound_kind_str(result.report.bound_kind);
        if (result.report.achieved_error) {
            row.achieved_error = result.report.achieved_error;
            if (result.report.input_norm > 0.0)
                row.rse = *result.report.achieved_error / result.report.input_norm;
        }
        row.wall_time_ms = result.report.wall_time_ms;
        row.param_count = param_count(result.tt);
        write_report(args.report_path, {row});
    }
}

struct CompleteArgs {
    std::string in_path;
    std::string mask_path;
    std::string ranks_text;
    std::string retraction = "svd";
    double alpha = 1.0;
    int iters = 500;
    double stop_tol = 1e-6;
    std::uint64_t seed = 42;
    int refine = 2;
    std::string truth_path;
    std::string out_path;
    std::string report_path;
};

void run_complete(const CompleteArgs& args) {
    const DenseTensor values = load_tensor(args.in_path);
    const DenseTensor indicator = load_tensor(args.mask_path);
    const ObservationMask mask(indicator, values);

    CompletionConfig config;
    config.ranks =
        chain_from_interior(parse_int_list(args.ranks_text, "--ranks"), values.order(), "--ranks");
    config.retraction = method_from(args.retraction);
    config.step_size = args.alpha;
    config.max_iters = args.iters;
    config.stop_tol = args.stop_tol;
    config.seed = args.seed;
    config.refine_passes = args.refine;

    std::optional<DenseTensor> truth;
    if (!args.truth_path.empty()) truth = load_tensor(args.truth_path);

    const CompletionResult result =
        complete(mask, values.shape(), config, truth ? &*truth : nullptr);
    const IterationTrace& trace = result.trace;
    const std::size_t iters = trace.rse_observed.size();

    const char* status = trace.status == CompletionStatus::converged  ? "converged"
                         : trace.status == CompletionStatus::diverged ? "diverged"
                                                                      : "max-iters";
    std::string tail = fmt::format("observed rse {:.6g}", iters ? trace.rse_observed.back() : 0.0);
    if (truth && iters)
        tail += fmt::format(", full rse {:.6g}, psnr {:.2f} dB", trace.rse_full.back(),
                            trace.psnr.back());
    fmt::print("complete {}: {} after {} iterations, {}\n", args.retraction, status, iters, tail);
    if (!trace.note.empty()) fmt::print(stderr, "note: {}\n", trace.note);

    if (!args.out_path.empty()) write_tt(args.out_path, result.tt);
    if (!args.report_path.empty()) {
        std::vector<ReportRow> rows;
        rows.reserve(iters);
        for (std::size_t i = 0; i < iters; ++i) {
            ReportRow row;
            row.method = args.retraction;
            row.sweep = config.retraction == Method::urv ? "r2l" : "l2r";
            row.mode = "completion";
            row.ranks = config.ranks;
            row.rse = truth ? trace.rse_full[i] : trace.rse_observed[i];
            if (truth) row.psnr = trace.psnr[i];
            row.wall_time_ms = trace.wall_time_ms[i];
            row.param_count = param_count(result.tt);
            rows.push_back(std::move(row));
        }
        write_report(args.report_path, rows);
    }
}

ReportRow bench_row(const std::string& method, const std::string& sweep, const std::string& mode,
                    const DenseTensor& a, DecompResult& result) {
    verify_bound(a, result.tt, result.report);
    ReportRow row;
    row.method = method;
    row.sweep = sweep;
    row.mode = mode;
    row.ranks = result.report.ranks_chosen;
    row.bound = result.report.bound;
    row.bound_kind = bound_kind_str(result.report.bound_kind);
    row.achieved_error = result.report.achieved_error;
    if (result.report.input_norm > 0.0) row.rse = *result.report.achieved_error / result.report.input_norm;
    row.wall_time_ms = result.report.wall_time_ms;
    row.param_count = param_count(result.tt);
    return row;
}

// Random tensors with random feasible chains through the three bounded sweeps.
std::vector<ReportRow> bench_bounds(std::uint64_t seed, int trials) {
    std::vector<ReportRow> rows;
    Rng rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        const std::int64_t order = rng.uniform_int(3, 4);
        std::vector<std::int64_t> dims;
        for (std::int64_t k = 0; k < order; ++k) dims.push_back(rng.uniform_int(4, 8));
        const Shape shape{dims};
        const DenseTensor a = gen_gaussian(shape, rng.next_u64());
        std::vector<std::int64_t> ranks{1};
        for (std::int64_t k = 1; k < order; ++k) {
            const std::int64_t cap =
                std::min({shape.prefix_product(k), shape.element_count() / shape.prefix_product(k),
                          std::int64_t{5}});
            ranks.push_back(rng.uniform_int(1, cap));
        }
        ranks.push_back(1);

        DecompResult ulv = tt_ulv_fixed_rank_l2r(a, ranks);
        rows.push_back(bench_row("ulv", "l2r", "fixed_rank", a, ulv));
        DecompResult urv = tt_urv_fixed_rank_r2l(a, ranks);
        rows.push_back(bench_row("urv", "r2l", "fixed_rank", a, urv));
        DecompResult carry = tt_ulv_fixed_rank_r2l(a, ranks);
        rows.push_back(bench_row("ulv", "r2l", "fixed_rank", a, carry));
    }
    return rows;
}

// Planted trains recovered at their own ranks by every sweep algorithm.
std::vector<ReportRow> bench_recovery(std::uint64_t seed, int trials) {
    std::vector<ReportRow> rows;
    Rng rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        const Shape shape{{6, 7, 6, 5}};
        std::vector<std::int64_t> ranks{1};
        for (int k = 1; k < 4; ++k) ranks.push_back(rng.uniform_int(1, 3));
        ranks.push_back(1);
        const TTTensor planted = gen_planted_tt(shape, ranks, rng.next_u64());
        const DenseTensor a = reconstruct(planted);

        const struct {
            const char* method;
            const char* sweep;
        } paths[] = {{"svd", "l2r"}, {"svd", "r2l"}, {"ulv", "l2r"},
                     {"ulv", "r2l"}, {"urv", "r2l"}, {"urv", "l2r"}};
        for (const auto& path : paths) {
            DecompConfig config;
            config.method = method_from(path.method);
            config.sweep = sweep_from(path.sweep);
            config.mode = FixedRank{ranks};
            DecompResult result = decompose(a, config);
            rows.push_back(bench_row(path.method, path.sweep, "fixed_rank", a, result));
        }
    }
    return rows;
}

// Error decay on the classic 1/(i+j+k) family as the target rank grows.
std::vector<ReportRow> bench_hilbert() {
    std::vector<ReportRow> rows;
    const DenseTensor a = gen_hilbert(Shape{{20, 20, 20}});
    for (std::int64_t r : {2, 4, 6, 8}) {
        const std::vector<std::int64_t> ranks{1, r, r, 1};
        DecompResult svd = tt_svd(a, DecompConfig{.mode = FixedRank{ranks}});
        rows.push_back(bench_row("svd", "l2r", "fixed_rank", a, svd));
        DecompResult ulv = tt_ulv_fixed_rank_l2r(a, ranks);
        rows.push_back(bench_row("ulv", "l2r", "fixed_rank", a, ulv));
        DecompResult urv = tt_urv_fixed_rank_r2l(a, ranks);
        rows.push_back(bench_row("urv", "r2l", "fixed_rank", a, urv));
    }
    return rows;
}

void run_info(const std::string& path) {
    const std::string kind = sniff_kind(path);
    if (kind == "tensor") {
        const DenseTensor tensor = read_tensor(path);
        fmt::print("tensor: order {}, dims {}, {} elements, frobenius norm {:.6g}\n", tensor.order(),
                   dims_str(tensor.shape()), tensor.element_count(), frobenius_norm(tensor));
    } else {
        const TTTensor tt = read_tt(path);
        fmt::print("train: order {}, dims {}, ranks {}, {} parameters\n", tt.order(),
                   dims_str(tt.shape()), fmt::join(tt.ranks(), "x"), param_count(tt));
    }
}

struct GenArgs {
    std::string kind;
    std::string dims_text;
    std::string out_path;
    std::string ranks_text;
    std::uint64_t seed = 42;
    double fraction = 0.5;
    std::string out_tt_path;
};

void run_gen(const GenArgs& args) {
    const Shape shape{parse_int_list(args.dims_text, "--dims")};
    if (args.kind == "hilbert") {
        write_tensor(args.out_path, gen_hilbert(shape));
    } else if (args.kind == "gaussian") {
        write_tensor(args.out_path, gen_gaussian(shape, args.seed));
    } else if (args.kind == "mask") {
        write_tensor(args.out_path, gen_mask(shape, args.fraction, args.seed));
    } else {
        if (args.ranks_text.empty()) throw ArgumentError("gen: --kind planted requires --ranks");
        const std::vector<std::int64_t> chain =
            chain_from_interior(parse_int_list(args.ranks_text, "--ranks"), shape.order(), "--ranks");
        const TTTensor tt = gen_planted_tt(shape, chain, args.seed);
        write_tensor(args.out_path, reconstruct(tt));
        if (!args.out_tt_path.empty()) write_tt(args.out_tt_path, tt);
    }
    fmt::print("gen {}: dims {} written to {}\n", args.kind, dims_str(shape), args.out_path);
}

int run(int argc, const char* const* argv) {
    CLI::App app{"tensor-train decomposition via two-sided orthogonal factorizations"};
    app.require_subcommand(1);

    auto decompose_args = std::make_shared<DecomposeArgs>();
    CLI::App* dec = app.add_subcommand("decompose", "Factor a dense tensor into a tensor train");
    dec->add_option("--in", decompose_args->in_path, "input tensor file (binary, or .txt text)")
        ->required();
    dec->add_option("--method", decompose_args->method, "per-step factorization")
        ->check(CLI::IsMember({"svd", "ulv", "urv"}))
        ->capture_default_str();
    dec->add_option("--sweep", decompose_args->sweep, "core extraction direction")
        ->check(CLI::IsMember({"l2r", "r2l"}))
        ->capture_default_str();
    dec->add_option("--ranks", decompose_args->ranks_text,
                    "comma-separated interior ranks r_1,..,r_{d-1}");
    CLI::Option* eps_opt =
        dec->add_option("--eps", decompose_args->eps, "relative error target in [0, inf)");
    dec->add_option("--weights", decompose_args->weights_text,
                    "comma-separated per-cut budget weights (with --eps)");
    dec->add_option("--refine", decompose_args->refine, "extra pivoted passes per factorization")
        ->capture_default_str();
    CLI::Option* retain_opt =
        dec->add_option("--retain", decompose_args->retain,
                        "right-to-left ULV carry: l11 (triangular block) or full (column block)")
            ->check(CLI::IsMember({"l11", "full"}));
    dec->add_option("--out", decompose_args->out_path, "write the train here");
    dec->add_option("--report", decompose_args->report_path, "write a one-row CSV report here");
    dec->add_flag("--no-verify", decompose_args->no_verify,
                  "skip the reconstruction check against the error bound");
    dec->add_flag("--debug-checks", decompose_args->debug_checks,
                  "verify internal carry identities at every step");
    dec->callback([decompose_args, eps_opt, retain_opt] {
        run_decompose(*decompose_args, eps_opt->count() > 0, retain_opt->count() > 0);
    });

    auto recon_in = std::make_shared<std::string>();
    auto recon_out = std::make_shared<std::string>();
    CLI::App* rec = app.add_subcommand("reconstruct", "Expand a tensor train to a dense tensor");
    rec->add_option("--in", *recon_in, "input train file")->required();
    rec->add_option("--out", *recon_out, "output tensor file")->required();
    rec->callback([recon_in, recon_out] {
        const TTTensor tt = read_tt(*recon_in);
        write_tensor(*recon_out, reconstruct(tt));
        fmt::print("reconstruct: dims {} written to {}\n", dims_str(tt.shape()), *recon_out);
    });

    auto complete_args = std::make_shared<CompleteArgs>();
    CLI::App* com = app.add_subcommand("complete", "Recover a low-rank tensor from observed entries");
    com->add_option("--in", complete_args->in_path,
                    "tensor holding the observed values (entries outside the mask are ignored)")
        ->required();
    com->add_option("--mask", complete_args->mask_path, "0/1 indicator tensor of observed positions")
        ->required();
    com->add_option("--ranks", complete_args->ranks_text,
                    "comma-separated interior target ranks r_1,..,r_{d-1}")
        ->required();
    com->add_option("--retraction", complete_args->retraction, "fixed-rank projection method")
        ->check(CLI::IsMember({"svd", "ulv", "urv"}))
        ->capture_default_str();
    com->add_option("--alpha", complete_args->alpha, "gradient step size")->capture_default_str();
    com->add_option("--iters", complete_args->iters, "iteration cap")->capture_default_str();
    com->add_option("--stop-tol", complete_args->stop_tol,
                    "relative observed-error change that counts as converged (0 disables)")
        ->capture_default_str();
    com->add_option("--seed", complete_args->seed, "rng seed")->capture_default_str();
    com->add_option("--refine", complete_args->refine, "extra pivoted passes per factorization")
        ->capture_default_str();
    com->add_option("--truth", complete_args->truth_path,
                    "ground-truth tensor for full-error and psnr columns");
    com->add_option("--out", complete_args->out_path, "write the final train here");
    com->add_option("--report", complete_args->report_path, "write a per-iteration CSV report here");
    com->callback([complete_args] { run_complete(*complete_args); });

    auto suite = std::make_shared<std::string>();
    auto bench_report = std::make_shared<std::string>();
    auto bench_seed = std::make_shared<std::uint64_t>(42);
    auto bench_trials = std::make_shared<int>(20);
    CLI::App* ben = app.add_subcommand("bench", "Run a built-in experiment suite");
    ben->add_option("--suite", *suite, "bounds | recovery | hilbert")
        ->check(CLI::IsMember({"bounds", "recovery", "hilbert"}))
        ->required();
    ben->add_option("--report", *bench_report, "CSV output path")->required();
    ben->add_option("--seed", *bench_seed, "rng seed")->capture_default_str();
    ben->add_option("--trials", *bench_trials, "number of random fixtures")->capture_default_str();
    ben->callback([suite, bench_report, bench_seed, bench_trials] {
        std::vector<ReportRow> rows;
        if (*suite == "bounds")
            rows = bench_bounds(*bench_seed, *bench_trials);
        else if (*suite == "recovery")
            rows = bench_recovery(*bench_seed, *bench_trials);
        else
            rows = bench_hilbert();
        write_report(*bench_report, rows);
        fmt::print("bench {}: {} rows written to {}\n", *suite, rows.size(), *bench_report);
    });

    auto info_in = std::make_shared<std::string>();
    CLI::App* inf = app.add_subcommand("info", "Describe a tensor or train file");
    inf->add_option("--in", *info_in, "input file")->required();
    inf->callback([info_in] { run_info(*info_in); });

    auto gen_args = std::make_shared<GenArgs>();
    CLI::App* gen = app.add_subcommand("gen", "Write a synthetic tensor");
    gen->add_option("--kind", gen_args->kind, "hilbert | planted | gaussian | mask")
        ->check(CLI::IsMember({"hilbert", "planted", "gaussian", "mask"}))
        ->required();
    gen->add_option("--dims", gen_args->dims_text, "comma-separated mode sizes")->required();
    gen->add_option("--out", gen_args->out_path, "output tensor file")->required();
    gen->add_option("--ranks", gen_args->ranks_text, "interior ranks (planted)");
    gen->add_option("--seed", gen_args->seed, "rng seed")->capture_default_str();
    gen->add_option("--fraction", gen_args->fraction, "observed fraction (mask)")
        ->capture_default_str();
    gen->add_option("--out-tt", gen_args->out_tt_path, "also write the exact train (planted)");
    gen->callback([gen_args] { run_gen(*gen_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        fmt::print("{}", app.help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        fmt::print("{}", app.help("", CLI::AppFormatMode::All));
        return 0;
    } catch (const CLI::ParseError& e) {
        fmt::print(stderr, "error: {}\nRun with --help for usage.\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const ArgumentError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    } catch (const IndexError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    }
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("ttutv");
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ttutv
