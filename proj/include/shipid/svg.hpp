#pragma once

// Minimal deterministic SVG line/bar charts for validation reports.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace shipid::svg {

struct Series {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double width = 640, height = 420, margin = 50;

  double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

inline void pad(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double m = 0.05 * (hi - lo);
  lo -= m;
  hi += m;
}

inline std::string header(const Frame& f, const std::string& title, const std::string& xlabel,
                          const std::string& ylabel) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) +
                  "\" height=\"" + num(f.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(f.width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(title) + "</text>\n";
  s += "<text x=\"" + num(f.width / 2) + "\" y=\"" + num(f.height - 10) +
       "\" text-anchor=\"middle\" font-size=\"12\">" + escape(xlabel) + "</text>\n";
  s += "<text x=\"14\" y=\"" + num(f.height / 2) + "\" font-size=\"12\" transform=\"rotate(-90 14 " +
       num(f.height / 2) + ")\" text-anchor=\"middle\">" + escape(ylabel) + "</text>\n";
  s += "<rect x=\"" + num(f.margin) + "\" y=\"" + num(f.margin) + "\" width=\"" +
       num(f.width - 2 * f.margin) + "\" height=\"" + num(f.height - 2 * f.margin) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(f.margin) + "\" y=\"" + num(f.height - f.margin + 14) +
       "\" font-size=\"10\">" + num(f.x0) + "</text>\n";
  s += "<text x=\"" + num(f.width - f.margin) + "\" y=\"" + num(f.height - f.margin + 14) +
       "\" font-size=\"10\" text-anchor=\"end\">" + num(f.x1) + "</text>\n";
  s += "<text x=\"" + num(f.margin - 4) + "\" y=\"" + num(f.height - f.margin) +
       "\" font-size=\"10\" text-anchor=\"end\">" + num(f.y0) + "</text>\n";
  s += "<text x=\"" + num(f.margin - 4) + "\" y=\"" + num(f.margin + 10) +
       "\" font-size=\"10\" text-anchor=\"end\">" + num(f.y1) + "</text>\n";
  return s;
}

}  // namespace detail

inline std::string line_chart(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel, const std::vector<Series>& series,
                              bool equal_aspect = false) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  detail::pad(x0, x1);
  detail::pad(y0, y1);
  if (equal_aspect) {
    const double span = std::max(x1 - x0, y1 - y0);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    x0 = cx - span / 2, x1 = cx + span / 2, y0 = cy - span / 2, y1 = cy + span / 2;
  }
  detail::Frame f{x0, x1, y0, y1};
  std::string out = detail::header(f, title, xlabel, ylabel);
  double legend_y = f.margin + 14;
  for (const auto& s : series) {
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
    if (s.dashed) out += " stroke-dasharray=\"5,3\"";
    out += " points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      out += detail::num(f.px(s.x[i])) + "," + detail::num(f.py(s.y[i])) + " ";
    }
    out += "\"/>\n";
    out += "<text x=\"" + detail::num(f.width - f.margin - 4) + "\" y=\"" + detail::num(legend_y) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"" + s.color + "\">" +
           detail::escape(s.name) + "</text>\n";
    legend_y += 14;
  }
  out += "</svg>\n";
  return out;
}

/// Grouped bars: groups along x, one bar per series inside each group.
inline std::string bar_chart(const std::string& title, const std::string& ylabel,
                             const std::vector<std::string>& groups,
                             const std::vector<Series>& series) {
  double y1 = 0.0;
  for (const auto& s : series) {
    for (double v : s.y) y1 = std::max(y1, v);
  }
  if (!(y1 > 0.0)) y1 = 1.0;
  detail::Frame f{0.0, static_cast<double>(std::max<std::size_t>(groups.size(), 1)), 0.0, y1 * 1.05};
  std::string out = detail::header(f, title, "", ylabel);
  const double group_w = (f.width - 2 * f.margin) / std::max<std::size_t>(groups.size(), 1);
  const double bar_w = 0.8 * group_w / std::max<std::size_t>(series.size(), 1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = f.margin + g * group_w + 0.1 * group_w;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = g < series[s].y.size() ? series[s].y[g] : 0.0;
      const double top = f.py(v);
      out += "<rect x=\"" + detail::num(gx + s * bar_w) + "\" y=\"" + detail::num(top) +
             "\" width=\"" + detail::num(bar_w * 0.95) + "\" height=\"" +
             detail::num(f.py(0.0) - top) + "\" fill=\"" + series[s].color + "\"/>\n";
    }
    out += "<text x=\"" + detail::num(gx + 0.4 * group_w) + "\" y=\"" +
           detail::num(f.height - f.margin + 26) + "\" font-size=\"10\" text-anchor=\"middle\">" +
           detail::escape(groups[g]) + "</text>\n";
  }
  double legend_y = f.margin + 14;
  for (const auto& s : series) {
    out += "<text x=\"" + detail::num(f.width - f.margin - 4) + "\" y=\"" + detail::num(legend_y) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"" + s.color + "\">" +
           detail::escape(s.name) + "</text>\n";
    legend_y += 14;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace shipid::svg
