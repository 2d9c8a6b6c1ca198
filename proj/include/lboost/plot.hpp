#pragma once

#include <filesystem>
#include <string>

#include "lboost/csv.hpp"

namespace lboost {

enum class PlotKind { line, line_logx, scatter };
PlotKind parse_plot_kind(const std::string& name);

/// Renders a tidy plot-data table as SVG. The first three columns are read as
/// x, series and y; a fourth column, when present, is printed next to each
/// point. Output depends only on the input bytes.
std::string render_svg(const CsvTable& table, PlotKind kind, const std::string& title);

/// Reads `data_file` and writes the SVG to `svg_path`.
void emit_plot(const std::filesystem::path& data_file, PlotKind kind, const std::filesystem::path& svg_path);

}  // namespace lboost
