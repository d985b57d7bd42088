// Minimal static SVG chart emission (line charts, boxplots, heatmaps,
// tables). No external renderer; output is plain SVG 1.1.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace trajas::svg {

constexpr const char* kSeriesColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                         "#d62728", "#9467bd", "#8c564b"};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline void header(std::ostream& os, int w, int h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline void text(std::ostream& os, double x, double y, const std::string& s,
                 int size = 11, const char* anchor = "start") {
  os << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
     << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s
     << "</text>\n";
}

inline void line(std::ostream& os, double x1, double y1, double x2, double y2,
                 const char* color = "#333", double width = 1.0) {
  os << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
     << "\" y2=\"" << y2 << "\" stroke=\"" << color << "\" stroke-width=\""
     << width << "\"/>\n";
}

inline void rect(std::ostream& os, double x, double y, double w, double h,
                 const std::string& fill, const char* stroke = "#333") {
  os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
     << "\" height=\"" << h << "\" fill=\"" << fill << "\" stroke=\"" << stroke
     << "\"/>\n";
}

struct Scale {
  double lo, hi, px0, px1;
  double operator()(double v) const {
    return hi == lo ? 0.5 * (px0 + px1)
                    : px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace detail

// Multi-series line chart; y may be plotted in log10 space by the caller.
inline void line_chart(std::ostream& os, const std::vector<Series>& series,
                       const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  const int W = 640, H = 420, L = 70, R = 140, T = 40, B = 50;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  detail::Scale sx{xlo, xhi, double(L), double(W - R)};
  detail::Scale sy{ylo, yhi, double(H - B), double(T)};
  detail::header(os, W, H);
  detail::text(os, W / 2.0, 20, title, 14, "middle");
  detail::line(os, L, T, L, H - B);
  detail::line(os, L, H - B, W - R, H - B);
  for (int t = 0; t <= 4; ++t) {
    const double xv = xlo + t * (xhi - xlo) / 4.0;
    const double yv = ylo + t * (yhi - ylo) / 4.0;
    detail::text(os, sx(xv), H - B + 16, detail::fmt(xv), 10, "middle");
    detail::text(os, L - 6, sy(yv) + 4, detail::fmt(yv), 10, "end");
  }
  detail::text(os, (L + W - R) / 2.0, H - 12, x_label, 11, "middle");
  detail::text(os, 16, T - 10, y_label, 11, "start");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kSeriesColors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].x.size(); ++i)
      os << sx(series[k].x[i]) << "," << sy(series[k].y[i]) << " ";
    os << "\"/>\n";
    detail::line(os, W - R + 10, T + 16.0 * k + 8, W - R + 30, T + 16.0 * k + 8,
                 color, 2.0);
    detail::text(os, W - R + 35, T + 16.0 * k + 12, series[k].label, 11);
  }
  os << "</svg>\n";
}

struct BoxStats {
  std::string label;
  double q1, median, q3, lo, hi, mean;
};

inline BoxStats box_stats(const std::string& label, std::vector<double> v) {
  BoxStats b;
  b.label = label;
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double idx = p * (v.size() - 1);
    const std::size_t k = static_cast<std::size_t>(idx);
    const double frac = idx - k;
    return k + 1 < v.size() ? v[k] * (1 - frac) + v[k + 1] * frac : v[k];
  };
  b.q1 = q(0.25);
  b.median = q(0.5);
  b.q3 = q(0.75);
  b.lo = v.front();
  b.hi = v.back();
  double s = 0;
  for (double x : v) s += x;
  b.mean = s / v.size();
  return b;
}

inline void boxplot(std::ostream& os, const std::vector<BoxStats>& boxes,
                    const std::string& title, const std::string& y_label) {
  const int W = 620, H = 400, L = 70, T = 40, B = 60;
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (const auto& b : boxes) {
    ylo = std::min(ylo, b.lo);
    yhi = std::max(yhi, b.hi);
  }
  if (ylo == yhi) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  detail::Scale sy{ylo, yhi, double(H - B), double(T)};
  detail::header(os, W, H);
  detail::text(os, W / 2.0, 20, title, 14, "middle");
  detail::line(os, L, T, L, H - B);
  detail::line(os, L, H - B, W - 20, H - B);
  for (int t = 0; t <= 4; ++t) {
    const double yv = ylo + t * (yhi - ylo) / 4.0;
    detail::text(os, L - 6, sy(yv) + 4, detail::fmt(yv), 10, "end");
  }
  detail::text(os, 16, T - 10, y_label, 11);
  const double slot = (W - 40.0 - L) / boxes.size();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double cx = L + slot * (i + 0.5);
    const double half = std::min(28.0, slot * 0.3);
    detail::line(os, cx, sy(b.lo), cx, sy(b.q1));
    detail::line(os, cx, sy(b.q3), cx, sy(b.hi));
    detail::rect(os, cx - half, sy(b.q3), 2 * half, sy(b.q1) - sy(b.q3),
                 "#aec7e8");
    detail::line(os, cx - half, sy(b.median), cx + half, sy(b.median), "#333",
                 2.0);
    // mean marker
    os << "<circle cx=\"" << cx << "\" cy=\"" << sy(b.mean)
       << "\" r=\"3.5\" fill=\"#d62728\"/>\n";
    detail::text(os, cx, H - B + 16, b.label, 11, "middle");
  }
  os << "</svg>\n";
}

inline void heatmap(std::ostream& os, const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols,
                    const std::vector<std::vector<double>>& values,
                    const std::string& title) {
  const int cell = 56, L = 90, T = 60;
  const int W = L + cell * static_cast<int>(cols.size()) + 20;
  const int H = T + cell * static_cast<int>(rows.size()) + 30;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : values)
    for (double v : r) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  detail::header(os, W, H);
  detail::text(os, W / 2.0, 22, title, 14, "middle");
  for (std::size_t j = 0; j < cols.size(); ++j)
    detail::text(os, L + cell * (j + 0.5), T - 8, cols[j], 11, "middle");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail::text(os, L - 8, T + cell * (i + 0.5) + 4, rows[i], 11, "end");
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = values[i][j];
      const double f = hi == lo ? 0.0 : (v - lo) / (hi - lo);
      const int shade = static_cast<int>(255 - 180 * f);
      std::ostringstream color;
      color << "rgb(" << shade << "," << shade << ",255)";
      detail::rect(os, L + cell * j, T + cell * i, cell, cell, color.str());
      detail::text(os, L + cell * (j + 0.5), T + cell * (i + 0.5) + 4,
                   detail::fmt(v), 11, "middle");
    }
  }
  os << "</svg>\n";
}

inline void table(std::ostream& os,
                  const std::vector<std::vector<std::string>>& cells,
                  const std::string& title) {
  const int cw = 90, ch = 26, L = 20, T = 50;
  const int cols = cells.empty() ? 0 : static_cast<int>(cells[0].size());
  const int W = L + cw * cols + 20;
  const int H = T + ch * static_cast<int>(cells.size()) + 20;
  detail::header(os, W, H);
  detail::text(os, W / 2.0, 24, title, 14, "middle");
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells[i].size(); ++j) {
      detail::rect(os, L + cw * static_cast<double>(j),
                   T + ch * static_cast<double>(i), cw, ch,
                   i == 0 ? "#e8e8e8" : "white", "#999");
      detail::text(os, L + cw * j + cw / 2.0, T + ch * i + ch / 2.0 + 4,
                   cells[i][j], 11, "middle");
    }
  os << "</svg>\n";
}

}  // namespace trajas::svg
