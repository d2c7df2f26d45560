// svg.cpp

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "output.hpp"

namespace nearfield::cli {

namespace {

constexpr double width = 640;
constexpr double height = 440;
constexpr double left = 80;
constexpr double right = 170;  // legend column
constexpr double top = 40;
constexpr double bottom = 60;

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Axis {
    double lo{};
    double hi{};
    bool log{};

    double map(double v) const {
        const double a = log ? std::log10(v) : v;
        return (a - lo) / (hi - lo);
    }
    bool shows(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Axis make_axis(const std::vector<double>& values, bool log) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (!std::isfinite(v) || (log && v <= 0.0)) continue;
        const double a = log ? std::log10(v) : v;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (log) {
        lo = std::floor(lo);
        hi = std::ceil(hi);
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi, log};
}

std::vector<double> ticks(const Axis& axis) {
    std::vector<double> out;
    if (axis.log) {
        const int step = std::max(1, static_cast<int>(std::ceil((axis.hi - axis.lo) / 8.0)));
        for (int e = static_cast<int>(axis.lo); e <= static_cast<int>(axis.hi); e += step) {
            out.push_back(std::pow(10.0, e));
        }
        return out;
    }
    const double raw = (axis.hi - axis.lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    for (double v = std::ceil(axis.lo / step) * step; v <= axis.hi + 1e-9 * step; v += step) {
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
}

}  // namespace

std::string render_svg(const Plot& plot) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : plot.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    const Axis ax = make_axis(xs, plot.log_x);
    const Axis ay = make_axis(ys, plot.log_y);
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto px = [&](double x) { return left + pw * ax.map(x); };
    auto py = [&](double y) { return top + ph * (1.0 - ay.map(y)); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) + "\" height=\"" +
           fixed(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(plot.title) + "</text>\n";
    svg += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(pw) +
           "\" height=\"" + fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : ticks(ax)) {
        const double x = px(t);
        svg += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" + fixed(x) +
               "\" y2=\"" + fixed(top + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(top + ph + 18) +
               "\" text-anchor=\"middle\">" + format_number(t) + "</text>\n";
    }
    for (double t : ticks(ay)) {
        const double y = py(t);
        svg += "<line x1=\"" + fixed(left - 5) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(left) +
               "\" y2=\"" + fixed(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(y + 4) +
               "\" text-anchor=\"end\">" + format_number(t) + "</text>\n";
    }
    svg += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(height - 15) +
           "\" text-anchor=\"middle\">" + escape(plot.x_label) + "</text>\n";
    svg += "<text transform=\"translate(18," + fixed(top + ph / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">" + escape(plot.y_label) + "</text>\n";

    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        const std::string colour = palette[i % std::size(palette)];
        std::string points;
        for (std::size_t j = 0; j < std::min(s.x.size(), s.y.size()); ++j) {
            if (!ax.shows(s.x[j]) || !ay.shows(s.y[j])) continue;
            const double x = px(s.x[j]);
            const double y = py(s.y[j]);
            if (s.markers) {
                svg += "<circle cx=\"" + fixed(x) + "\" cy=\"" + fixed(y) + "\" r=\"2.5\" fill=\"" +
                       colour + "\"/>\n";
            } else {
                points += fixed(x) + "," + fixed(y) + " ";
            }
        }
        if (!s.markers && !points.empty()) {
            points.pop_back();
            svg += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\" points=\"" +
                   points + "\"/>\n";
        }
        const double ly = top + 14 + 18 * static_cast<double>(i);
        const double lx = left + pw + 12;
        svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly - 4) + "\" x2=\"" + fixed(lx + 20) +
               "\" y2=\"" + fixed(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fixed(lx + 26) + "\" y=\"" + fixed(ly) + "\">" + escape(s.label) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace nearfield::cli
