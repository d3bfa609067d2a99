#include "gcnet/common/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gcnet/common/stats.hpp"

namespace gcnet::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v, double px_lo, double px_hi) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double t = ((log ? std::log10(v) : v) - a) / (b - a);
    return px_lo + t * (px_hi - px_lo);
  }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis ax;
  ax.log = log;
  if (!(lo < std::numeric_limits<double>::infinity())) lo = hi = log ? 1.0 : 0.0;
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (hi <= lo) hi = lo * 10.0;
  } else if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  ax.lo = lo;
  ax.hi = hi;
  return ax;
}

std::vector<double> ticks(const Axis& ax) {
  std::vector<double> t;
  if (ax.log) {
    for (double v = ax.lo; v <= ax.hi * 1.0000001; v *= 10.0) t.push_back(v);
    return t;
  }
  for (int i = 0; i <= 5; ++i) t.push_back(ax.lo + (ax.hi - ax.lo) * i / 5.0);
  return t;
}

std::string header(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      kWidth, kHeight, kLeft + (kWidth - kLeft - kRight) / 2.0, escape(title));
}

std::string y_axis(const Axis& ay, const std::string& y_label) {
  std::string s;
  const double y0 = kHeight - kBottom, y1 = kTop;
  s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", kLeft, y0, y1);
  for (double t : ticks(ay)) {
    const double y = ay.map(t, y0, y1);
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#dddddd\"/>\n", kLeft, y,
                     kWidth - kRight);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6, y + 4, t);
  }
  s += fmt::format("<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n",
                   (y0 + y1) / 2.0, escape(y_label));
  return s;
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_y) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  const Axis ax = make_axis(xlo, xhi, false);
  const Axis ay = make_axis(ylo, yhi, log_y);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::string out = header(title);
  out += y_axis(ay, y_label);
  out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n", x0, y0, x1);
  for (double t : ticks(ax))
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", ax.map(t, x0, x1),
                       y0 + 18, t);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", (x0 + x1) / 2.0,
                     kHeight - 18, escape(x_label));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      pts += fmt::format("{:.2f},{:.2f} ", ax.map(s.x[i], x0, x1), ay.map(s.y[i], y0, y1));
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"3\"/>\n",
                       x1 + 12, ly, x1 + 36, color);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", x1 + 42, ly + 4, escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

std::string box_plot(const std::string& title, const std::string& y_label, const std::vector<Box>& boxes, bool log_y) {
  std::vector<std::vector<double>> finite(boxes.size());
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    for (double v : boxes[k].values)
      if (std::isfinite(v) && !(log_y && v <= 0.0)) finite[k].push_back(v);
    std::sort(finite[k].begin(), finite[k].end());
    if (!finite[k].empty()) {
      ylo = std::min(ylo, finite[k].front());
      yhi = std::max(yhi, finite[k].back());
    }
  }
  const Axis ay = make_axis(ylo, yhi, log_y);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string out = header(title);
  out += y_axis(ay, y_label);
  out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n", x0, y0, x1);
  const double slot = (x1 - x0) / static_cast<double>(std::max<std::size_t>(boxes.size(), 1));
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const double cx = x0 + slot * (static_cast<double>(k) + 0.5);
    const double half = std::min(40.0, slot * 0.3);
    const char* color = kPalette[k % std::size(kPalette)];
    const std::size_t dropped = boxes[k].values.size() - finite[k].size();
    std::string label = boxes[k].label;
    if (dropped > 0) label += fmt::format(" ({} failed)", dropped);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", cx, y0 + 18, escape(label));
    if (finite[k].empty()) continue;
    const auto& v = finite[k];
    const double p05 = ay.map(quantile_sorted(v, 0.05), y0, y1), q1 = ay.map(quantile_sorted(v, 0.25), y0, y1);
    const double med = ay.map(quantile_sorted(v, 0.5), y0, y1), q3 = ay.map(quantile_sorted(v, 0.75), y0, y1);
    const double p95 = ay.map(quantile_sorted(v, 0.95), y0, y1);
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = ay.map(sum / static_cast<double>(v.size()), y0, y1);
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", cx, p05, q1);
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", cx, q3, p95);
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\" fill-opacity=\"0.5\" "
                       "stroke=\"black\"/>\n",
                       cx - half, q3, 2 * half, std::max(q1 - q3, 0.5), color);
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{2:.1f}\" x2=\"{1:.1f}\" y2=\"{2:.1f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
                       cx - half, cx + half, med);
    out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"white\" stroke=\"black\"/>\n", cx, mean);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">box: quartiles</text>\n", x1 + 12, kTop + 14);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">whiskers: 5-95%</text>\n", x1 + 12, kTop + 30);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">circle: mean</text>\n", x1 + 12, kTop + 46);
  out += "</svg>\n";
  return out;
}

}  // namespace gcnet::svg
