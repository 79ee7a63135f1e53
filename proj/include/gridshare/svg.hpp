#pragma once

#include <string>
#include <vector>

namespace gridshare {

// Minimal static SVG emitters for batch reports. No styling hooks, no
// interactivity; every chart is a standalone file.

struct SvgSeries {
  std::string label;
  std::vector<double> y;  // x is the 0-based index
};

// Polyline chart; each series is auto-scaled to the common y range unless
// normalize is set, in which case each series is scaled to its own maximum
// (used to overlay quantities with different units).
std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           const std::string& x_label, const std::string& y_label,
                           bool normalize = false);

// Grouped two-value bars per category (Fig.-style paired comparison).
std::string svg_paired_bars(const std::string& title, const std::vector<std::string>& categories,
                            const std::vector<double>& first, const std::string& first_label,
                            const std::vector<double>& second, const std::string& second_label);

}  // namespace gridshare
