#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "braggsqueeze/experiments.hpp"

namespace braggsqueeze::io {

/// Provenance stamped into every output file.
struct Stamp {
    std::string config_hash;
    double resolution_factor = 1.0;
    double dz = 0.0;  // cm
    std::size_t n_z = 0;
};

Stamp make_stamp(const Setup& s);

/// 9 significant digits, "nan" / "inf" / "-inf" for non-finite values.
std::string fmt9(double v);

/// Run-schema column names.
const std::vector<std::string>& run_columns();

/// One CSV row for a (possibly failed) run. `result` is ignored unless
/// status starts with "ok"; result columns then read nan.
std::vector<std::string> run_row(const Setup& s, const RunResult& result, std::string_view status);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

Table run_table(const Setup& s, const RunResult& r);
/// Sweep table: the swept variable `x_column` comes first.
Table sweep_table(std::string_view x_column, const std::vector<SweepRow>& rows,
                  const std::vector<Setup>& setups);

/// CSV with `# key=value` provenance lines before the column header.
std::string to_csv(const Table& t, const Stamp& stamp, const std::vector<std::string>& notes = {});

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // nan entries break the line
};

struct Panel {
    std::string y_label;
    std::vector<Series> series;
};

/// Static SVG with vertically stacked panels sharing the x axis.
std::string to_svg(std::string_view title, std::string_view x_label, const std::vector<Panel>& panels,
                   const Stamp& stamp);

/// Writes `text` to `path` in binary mode, throwing on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

} // namespace braggsqueeze::io
