#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "beetle/core/csv.hpp"

namespace beetle::harness {

struct Series {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

namespace detail {

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(1);
    s << v;
    return s.str();
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    return colors[i % 7];
}

}  // namespace detail

/// Line chart with one polyline per series, axes and a legend.
inline std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                                  const std::vector<Series>& series) {
    const double w = 640, h = 400, left = 60, right = 150, top = 40, bottom = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
            x0 = first ? s.xs[i] : std::min(x0, s.xs[i]);
            x1 = first ? s.xs[i] : std::max(x1, s.xs[i]);
            y0 = first ? s.ys[i] : std::min(y0, s.ys[i]);
            y1 = first ? s.ys[i] : std::max(y1, s.ys[i]);
            first = false;
        }
    }
    y0 = std::min(y0, 0.0);
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const double pw = w - left - right, ph = h - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << detail::escape_xml(title) << "</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        o << "<text x=\"" << detail::num(px(xv)) << "\" y=\"" << top + ph + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << beetle::detail::format_double(xv)
          << "</text>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << detail::num(py(yv) + 3)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << detail::num(yv) << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << detail::escape_xml(x_label)
      << "</text>\n";
    o << "<text x=\"14\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 14 " << top + ph / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << detail::escape_xml(y_label)
      << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        o << "<polyline fill=\"none\" stroke=\"" << detail::palette(s) << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < series[s].xs.size() && i < series[s].ys.size(); ++i) {
            o << (i ? " " : "") << detail::num(px(series[s].xs[i])) << ',' << detail::num(py(series[s].ys[i]));
        }
        o << "\"/>\n";
        const double ly = top + 14.0 * static_cast<double>(s);
        o << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
          << "\" stroke=\"" << detail::palette(s) << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << detail::escape_xml(series[s].name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Vertical bar chart, one bar per label.
inline std::string svg_bar_chart(const std::string& title, const std::string& y_label,
                                 const std::vector<std::string>& labels, const std::vector<double>& values) {
    const double w = 640, h = 400, left = 60, top = 40, bottom = 50;
    const double pw = w - left - 20, ph = h - top - bottom;
    double hi = 0.0;
    for (double v : values) hi = std::max(hi, v);
    if (hi <= 0.0) hi = 1.0;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << detail::escape_xml(title) << "</text>\n";
    o << "<text x=\"14\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 14 " << top + ph / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << detail::escape_xml(y_label)
      << "</text>\n";
    const std::size_t n = std::min(labels.size(), values.size());
    const double slot = n ? pw / static_cast<double>(n) : pw;
    for (std::size_t i = 0; i < n; ++i) {
        const double bh = values[i] / hi * ph;
        const double x = left + slot * static_cast<double>(i) + slot * 0.15;
        o << "<rect x=\"" << detail::num(x) << "\" y=\"" << detail::num(top + ph - bh) << "\" width=\""
          << detail::num(slot * 0.7) << "\" height=\"" << detail::num(bh) << "\" fill=\"" << detail::palette(i)
          << "\"/>\n";
        o << "<text x=\"" << detail::num(x + slot * 0.35) << "\" y=\"" << top + ph + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::escape_xml(labels[i])
          << "</text>\n";
        o << "<text x=\"" << detail::num(x + slot * 0.35) << "\" y=\"" << detail::num(top + ph - bh - 4)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << beetle::detail::format_double(values[i])
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace beetle::harness
