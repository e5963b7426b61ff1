#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "scarv/harness.hpp"
#include "scarv/io.hpp"

namespace scarv {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    return out;
}

void svg_header(std::ofstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
}

void svg_axes(std::ofstream& out) {
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";
}

}  // namespace

void emit_method_bar_svg(const ExperimentResult& result, const std::string& path) {
    std::vector<std::pair<std::string, double>> bars;
    for (const auto& rec : result.records) {
        if (rec.outer_run == -1 && rec.metric == "stability")
            bars.push_back({rec.method, rec.value});
    }
    if (bars.empty()) throw DataError("no stability records to plot");

    auto out = open_svg(path);
    svg_header(out, "ranking stability by method");
    svg_axes(out);

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double slot = plot_w / static_cast<double>(bars.size());
    double hi = 0.0;
    for (const auto& [_, v] : bars) hi = std::max(hi, v);
    if (hi <= 0.0) hi = 1.0;

    for (std::size_t i = 0; i < bars.size(); ++i) {
        double h = plot_h * bars[i].second / hi;
        double x = kMarginLeft + slot * static_cast<double>(i) + slot * 0.15;
        double y = kHeight - kMarginBottom - h;
        out << "<rect class=\"bar\" data-method=\"" << bars[i].first << "\" x=\""
            << format_float(x) << "\" y=\"" << format_float(y) << "\" width=\""
            << format_float(slot * 0.7) << "\" height=\"" << format_float(h) << "\" fill=\""
            << kPalette[i % 8] << "\"/>\n";
        out << "<text x=\"" << format_float(x + slot * 0.35) << "\" y=\""
            << kHeight - kMarginBottom + 14 << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"9\">" << bars[i].first << "</text>\n";
        out << "<text x=\"" << format_float(x + slot * 0.35) << "\" y=\""
            << format_float(y - 4) << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"9\">" << format_float(bars[i].second)
            << "</text>\n";
    }
    out << "</svg>\n";
}

void emit_frontier_svg(std::span<const FrontierRow> rows, const std::string& path) {
    if (rows.empty()) throw DataError("no frontier rows to plot");

    struct Series {
        std::string name;
        std::vector<double> values;
    };
    std::vector<Series> series = {{"full_scarv", {}},
                                  {"seed_only_mean", {}},
                                  {"seed_only_median", {}},
                                  {"seed_only_borda", {}}};
    std::vector<double> r_values;
    for (const auto& row : rows) {
        r_values.push_back(static_cast<double>(row.seeds));
        series[0].values.push_back(row.full_scarv);
        series[1].values.push_back(row.seed_mean);
        series[2].values.push_back(row.seed_median);
        series[3].values.push_back(row.seed_borda);
    }

    double lo = 1.0, hi = -1.0;
    for (const auto& s : series) {
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    double pad = std::max(0.01, (hi - lo) * 0.1);
    lo -= pad;
    hi += pad;
    double r_lo = *std::min_element(r_values.begin(), r_values.end());
    double r_hi = *std::max_element(r_values.begin(), r_values.end());
    if (r_hi == r_lo) r_hi = r_lo + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto x_of = [&](double r) {
        return kMarginLeft + plot_w * (r - r_lo) / (r_hi - r_lo);
    };
    auto y_of = [&](double v) {
        return kHeight - kMarginBottom - plot_h * (v - lo) / (hi - lo);
    };

    auto out = open_svg(path);
    svg_header(out, "stability vs seed budget");
    svg_axes(out);

    for (double r : r_values) {
        out << "<text x=\"" << format_float(x_of(r)) << "\" y=\""
            << kHeight - kMarginBottom + 14 << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"10\">" << format_float(r) << "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        out << "<polyline class=\"series\" data-method=\"" << series[s].name
            << "\" fill=\"none\" stroke=\"" << kPalette[s % 8] << "\" stroke-width=\"2\" "
            << "points=\"";
        for (std::size_t i = 0; i < r_values.size(); ++i) {
            if (i > 0) out << ' ';
            out << format_float(x_of(r_values[i])) << ',' << format_float(y_of(series[s].values[i]));
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < r_values.size(); ++i) {
            out << "<circle class=\"pt\" data-method=\"" << series[s].name << "\" cx=\""
                << format_float(x_of(r_values[i])) << "\" cy=\""
                << format_float(y_of(series[s].values[i])) << "\" r=\"3\" fill=\""
                << kPalette[s % 8] << "\"/>\n";
        }
        out << "<text x=\"" << kWidth - kMarginRight - 150 << "\" y=\""
            << kMarginTop + 14 * static_cast<int>(s) << "\" font-family=\"sans-serif\" "
            << "font-size=\"10\" fill=\"" << kPalette[s % 8] << "\">" << series[s].name
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace scarv
