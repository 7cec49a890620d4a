#pragma once

// Minimal static SVG line chart for score processes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funroot/io.hpp"

namespace funroot::tools {

struct Series {
    std::string label;
    Eigen::VectorXd values;
};

inline void write_line_chart(std::ostream& out, const std::string& title, const std::vector<double>& x,
                             const std::vector<Series>& series) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    const double w = 720, h = 360, left = 60, right = 130, top = 40, bottom = 40;
    const double pw = w - left - right, ph = h - top - bottom;

    double xmin = x.front(), xmax = x.back();
    double ymin = 0.0, ymax = 0.0;
    bool first = true;
    for (const auto& s : series)
        for (Eigen::Index i = 0; i < s.values.size(); ++i) {
            const double v = s.values[i];
            ymin = first ? v : std::min(ymin, v);
            ymax = first ? v : std::max(ymax, v);
            first = false;
        }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };
    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    if (ymin < 0.0 && ymax > 0.0)
        out << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << coord(py(0.0)) << "\" y2=\"" << coord(py(0.0))
            << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << fmt(ymax) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + ph << "\" text-anchor=\"end\">" << fmt(ymin) << "</text>\n";
    out << "<text x=\"" << left << "\" y=\"" << top + ph + 18 << "\">" << fmt(xmin) << "</text>\n";
    out << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"end\">" << fmt(xmax) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = palette[k % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (Eigen::Index i = 0; i < series[k].values.size(); ++i)
            out << (i ? " " : "") << coord(px(x[static_cast<std::size_t>(i)])) << ',' << coord(py(series[k].values[i]));
        out << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        out << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << series[k].label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace funroot::tools
