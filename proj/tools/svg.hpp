// svg.hpp — minimal line plots

#pragma once

#include <string>
#include <vector>

namespace nearfield::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers{false};  // dots instead of a line
};

struct Plot {
    std::string name;  // file stem
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x{true};
    bool log_y{true};
    std::vector<Series> series;
};

/// Points that cannot be shown on a log axis (<= 0) are skipped.
std::string render_svg(const Plot& plot);

}  // namespace nearfield::cli
