#include "lboost/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace lboost {

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "line") return PlotKind::line;
    if (name == "line_logx") return PlotKind::line_logx;
    if (name == "scatter") return PlotKind::scatter;
    throw std::invalid_argument("unknown plot kind '" + name + "' (expected line, line_logx or scatter)");
}

namespace {

constexpr double kWidth = 720, kHeight = 440, kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#00798c", "#8c564b", "#444444"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Point {
    double x, y;
    std::string label;
};

}  // namespace

std::string render_svg(const CsvTable& table, PlotKind kind, const std::string& title) {
    if (table.header.size() < 3) throw std::runtime_error("plot data needs at least three columns (x, series, y)");
    std::vector<std::string> order;
    std::map<std::string, std::vector<Point>> series;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto x = parse_double(row[0]);
        const auto y = parse_double(row[2]);
        if (!x || !y) throw std::runtime_error("plot data row " + std::to_string(r + 1) + " is not numeric");
        if (!std::isfinite(*x) || !std::isfinite(*y)) continue;
        if (kind == PlotKind::line_logx && !(*x > 0.0)) throw std::runtime_error("log-x plot needs positive x values");
        auto [it, inserted] = series.try_emplace(row[1]);
        if (inserted) order.push_back(row[1]);
        it->second.push_back({kind == PlotKind::line_logx ? std::log10(*x) : *x, *y, row.size() > 3 ? row[3] : ""});
    }

    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& [name, pts] : series)
        for (const auto& p : pts) {
            xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
        }
    if (series.empty()) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad, ymax += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kLeft) + "\" y=\"22\" font-size=\"14\">" + escape(title) + "</text>\n";
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0, fy = ymin + (ymax - ymin) * i / 4.0;
        const double shown_x = kind == PlotKind::line_logx ? std::pow(10.0, fx) : fx;
        svg += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
               tick_label(shown_x) + "</text>\n";
        svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(fy) + 4) + "\" text-anchor=\"end\">" +
               tick_label(fy) + "</text>\n";
        svg += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(sy(fy)) + "\" y2=\"" +
               num(sy(fy)) + "\" stroke=\"#ddd\"/>\n";
    }
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" +
           escape(table.header[0]) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" transform=\"rotate(-90 16 " + num(kTop + ph / 2) +
           ")\" text-anchor=\"middle\">" + escape(table.header[2]) + "</text>\n";

    for (std::size_t s = 0; s < order.size(); ++s) {
        const std::string color = kPalette[s % std::size(kPalette)];
        const auto& pts = series[order[s]];
        if (kind != PlotKind::scatter && pts.size() > 1) {
            svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i)
                svg += (i ? " " : "") + num(sx(pts[i].x)) + "," + num(sy(pts[i].y));
            svg += "\"/>\n";
        }
        for (const auto& p : pts) {
            svg += "<circle cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
            if (!p.label.empty())
                svg += "<text x=\"" + num(sx(p.x) + 3) + "\" y=\"" + num(sy(p.y) - 4) + "\" font-size=\"8\" fill=\"" +
                       color + "\">" + escape(p.label) + "</text>\n";
        }
        const double ly = kTop + 14 + 16 * static_cast<double>(s);
        svg += "<rect x=\"" + num(kLeft + pw + 12) + "\" y=\"" + num(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
               color + "\"/>\n";
        svg += "<text x=\"" + num(kLeft + pw + 28) + "\" y=\"" + num(ly + 1) + "\">" + escape(order[s]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const std::filesystem::path& data_file, PlotKind kind, const std::filesystem::path& svg_path) {
    const std::string svg = render_svg(read_csv(data_file), kind, data_file.stem().string());
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + svg_path.string() + "'");
    out << svg;
    if (!out) throw std::runtime_error("write failed for '" + svg_path.string() + "'");
}

}  // namespace lboost
