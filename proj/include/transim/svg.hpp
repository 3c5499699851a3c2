#ifndef TRANSIM_SVG_HPP
#define TRANSIM_SVG_HPP

#include <string>
#include <utility>
#include <vector>

namespace transim {

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (t seconds, value)
};

/// Minimal line plot, no external dependency. One polyline per series with a
/// small legend; returns the SVG document text.
std::string render_line_plot(const std::string& title, const std::string& y_label,
                             const std::vector<SvgSeries>& series);

}  // namespace transim

#endif
