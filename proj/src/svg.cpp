#include "gridshare/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gridshare/errors.hpp"

namespace gridshare {

namespace {

constexpr double kW = 860.0, kH = 420.0;
constexpr double kL = 70.0, kR = 30.0, kT = 46.0, kB = 52.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string fixed(double v, int prec = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

void open_svg(std::string& s, const std::string& title) {
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fixed(kW, 0) + " " +
       fixed(kH, 0) + "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fixed(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
       title + "</text>\n";
}

void axes(std::string& s, const std::string& x_label, const std::string& y_label) {
  s += "<line x1=\"" + fixed(kL) + "\" y1=\"" + fixed(kH - kB) + "\" x2=\"" + fixed(kW - kR) +
       "\" y2=\"" + fixed(kH - kB) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fixed(kL) + "\" y1=\"" + fixed(kT) + "\" x2=\"" + fixed(kL) + "\" y2=\"" +
       fixed(kH - kB) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fixed((kL + kW - kR) / 2) + "\" y=\"" + fixed(kH - 12) +
       "\" text-anchor=\"middle\">" + x_label + "</text>\n";
  s += "<text x=\"18\" y=\"" + fixed((kT + kH - kB) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + fixed((kT + kH - kB) / 2) +
       ")\">" + y_label + "</text>\n";
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           const std::string& x_label, const std::string& y_label,
                           bool normalize) {
  if (series.empty()) throw ConfigError("chart needs at least one series");
  std::size_t n = 0;
  for (const SvgSeries& s : series) n = std::max(n, s.y.size());
  if (n < 2) throw ConfigError("chart needs at least two points");

  double lo = 0.0, hi = 1.0;
  if (!normalize) {
    lo = series[0].y[0];
    hi = lo;
    for (const SvgSeries& s : series)
      for (double v : s.y) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (hi <= lo) hi = lo + 1.0;
  }

  std::string out;
  open_svg(out, title);
  axes(out, x_label, y_label);

  double plot_w = kW - kL - kR, plot_h = kH - kT - kB;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    double smax = 1.0;
    if (normalize) {
      smax = 0.0;
      for (double v : s.y) smax = std::max(smax, std::abs(v));
      if (smax <= 0.0) smax = 1.0;
    }
    std::string pts;
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      double fx = s.y.size() > 1 ? static_cast<double>(i) / (s.y.size() - 1) : 0.0;
      double vy = normalize ? s.y[i] / smax : (s.y[i] - lo) / (hi - lo);
      pts += fixed(kL + fx * plot_w) + "," + fixed(kH - kB - vy * plot_h) + " ";
    }
    const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + fixed(kW - kR - 160) + "\" y=\"" + fixed(kT + 18.0 * (si + 1)) +
           "\" fill=\"" + color + "\">" + s.label +
           (normalize ? " (peak " + num(smax) + ")" : "") + "</text>\n";
  }
  if (!normalize) {
    out += "<text x=\"" + fixed(kL - 6) + "\" y=\"" + fixed(kH - kB + 4) +
           "\" text-anchor=\"end\">" + num(lo) + "</text>\n";
    out += "<text x=\"" + fixed(kL - 6) + "\" y=\"" + fixed(kT + 4) + "\" text-anchor=\"end\">" +
           num(hi) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string svg_paired_bars(const std::string& title, const std::vector<std::string>& categories,
                            const std::vector<double>& first, const std::string& first_label,
                            const std::vector<double>& second, const std::string& second_label) {
  if (categories.empty() || categories.size() != first.size() || first.size() != second.size())
    throw ConfigError("bar chart inputs are misaligned");

  double hi = 0.0;
  for (double v : first) hi = std::max(hi, v);
  for (double v : second) hi = std::max(hi, v);
  if (hi <= 0.0) hi = 1.0;

  std::string out;
  open_svg(out, title);
  axes(out, "", "");

  double plot_w = kW - kL - kR, plot_h = kH - kT - kB;
  double group = plot_w / categories.size();
  double bar = group * 0.32;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    double cx = kL + group * (i + 0.5);
    double h1 = first[i] / hi * plot_h;
    double h2 = second[i] / hi * plot_h;
    out += "<rect x=\"" + fixed(cx - bar - 1) + "\" y=\"" + fixed(kH - kB - h1) + "\" width=\"" +
           fixed(bar) + "\" height=\"" + fixed(h1) + "\" fill=\"" + kPalette[0] + "\"/>\n";
    out += "<rect x=\"" + fixed(cx + 1) + "\" y=\"" + fixed(kH - kB - h2) + "\" width=\"" +
           fixed(bar) + "\" height=\"" + fixed(h2) + "\" fill=\"" + kPalette[1] + "\"/>\n";
    out += "<text x=\"" + fixed(cx) + "\" y=\"" + fixed(kH - kB + 16) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + categories[i] + "</text>\n";
  }
  out += "<rect x=\"" + fixed(kL + 8) + "\" y=\"" + fixed(kT + 6) +
         "\" width=\"12\" height=\"12\" fill=\"" + kPalette[0] + "\"/>\n";
  out += "<text x=\"" + fixed(kL + 26) + "\" y=\"" + fixed(kT + 16) + "\">" + first_label +
         "</text>\n";
  out += "<rect x=\"" + fixed(kL + 8) + "\" y=\"" + fixed(kT + 26) +
         "\" width=\"12\" height=\"12\" fill=\"" + kPalette[1] + "\"/>\n";
  out += "<text x=\"" + fixed(kL + 26) + "\" y=\"" + fixed(kT + 36) + "\">" + second_label +
         "</text>\n";
  out += "<text x=\"" + fixed(kL - 6) + "\" y=\"" + fixed(kT + 4) + "\" text-anchor=\"end\">" +
         num(hi) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace gridshare
