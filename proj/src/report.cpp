#include "ttutv/report.hpp"

#include <fstream>

#include <fmt/format.h>

#include "ttutv/errors.hpp"

namespace ttutv {

namespace {

// Shortest round-trip formatting, so reports are reproducible and re-parse to
// the exact double that was measured.
std::string num(double v) { return fmt::format("{}", v); }

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string rank_cell(const std::vector<std::int64_t>& ranks) {
    std::string cell;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (i) cell.push_back('x');
        cell += fmt::format("{}", ranks[i]);
    }
    return cell;
}

}  // namespace

const std::string& report_header() {
    static const std::string header =
        "schema_version,method,sweep,mode,ranks,eps,rse,psnr,bound,bound_kind,achieved_error,"
        "wall_time_ms,param_count";
    return header;
}

std::string format_report_row(const ReportRow& row) {
    return fmt::format("1,{},{},{},{},{},{},{},{},{},{},{},{}", row.method, row.sweep, row.mode,
                       rank_cell(row.ranks), opt(row.eps), opt(row.rse), opt(row.psnr),
                       opt(row.bound), row.bound_kind, opt(row.achieved_error), num(row.wall_time_ms),
                       row.param_count);
}

void write_report(const std::string& path, const std::vector<ReportRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(fmt::format("{}: cannot open for writing", path), 0);
    out << report_header() << '\n';
    for (const ReportRow& row : rows) out << format_report_row(row) << '\n';
    if (!out) throw ParseError(fmt::format("{}: short write", path), 0);
}

}  // namespace ttutv
