#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ttutv {

/// One CSV line of a run report. Optional fields render as empty cells;
/// ranks use 'x' as the in-cell separator (e.g. "1x5x5x1").
struct ReportRow {
    std::string method;   // svd | ulv | urv
    std::string sweep;    // l2r | r2l
    std::string mode;     // fixed_rank | fixed_tol | completion
    std::vector<std::int64_t> ranks;
    std::optional<double> eps;
    std::optional<double> rse;
    std::optional<double> psnr;
    std::optional<double> bound;
    std::string bound_kind;  // rss | sum | empty
    std::optional<double> achieved_error;
    double wall_time_ms = 0.0;
    std::int64_t param_count = 0;
};

/// Fixed, versioned header line (no trailing newline).
const std::string& report_header();

std::string format_report_row(const ReportRow& row);

/// Writes header plus rows with LF line endings.
void write_report(const std::string& path, const std::vector<ReportRow>& rows);

}  // namespace ttutv
