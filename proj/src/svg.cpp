#include "silunet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "silunet/errors.hpp"

namespace silunet::svg {

namespace {

constexpr double width = 640, height = 420;
constexpr double left = 70, right = 150, top = 40, bottom = 50;

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

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

void header(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
}

void axis_labels(std::ostringstream& os, const std::string& xl, const std::string& yl) {
  const double pw = width - left - right;
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 10)
     << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  os << "<text x=\"15\" y=\"" << num(top + (height - top - bottom) / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
     << num(top + (height - top - bottom) / 2) << ")\">" << escape(yl) << "</text>\n";
}

// Maps [0, 1] to a blue-to-yellow ramp.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + 215 * t));
  const int g = static_cast<int>(std::lround(30 + 200 * t));
  const int b = static_cast<int>(std::lround(120 - 90 * t));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render(const LinePlot& plot) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto yv = [&](double y) { return plot.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_y || y > 0.0);
  };
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, yv(s.y[i]));
      ymax = std::max(ymax, yv(s.y[i]));
    }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - (yv(y) - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  header(os, plot.title);
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double X = left + pw * i / 4.0, Y = top + ph - ph * i / 4.0;
    os << "<text x=\"" << num(X) << "\" y=\"" << num(top + ph + 15)
       << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
    os << "<text x=\"" << num(left - 5) << "\" y=\"" << num(Y + 4) << "\" text-anchor=\"end\">"
       << (plot.log_y ? "1e" + tick(fy) : tick(fy)) << "</text>\n";
  }
  axis_labels(os, plot.x_label, plot.y_label);
  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const char* color = palette[si % std::size(palette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (usable(s.x[i], s.y[i])) os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    os << "\"/>\n";
    const double ly = top + 10 + 16.0 * static_cast<double>(si);
    os << "<line x1=\"" << num(width - right + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
       << num(width - right + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(width - right + 35) << "\" y=\"" << num(ly + 4) << "\">"
       << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render(const Heatmap& map) {
  const std::size_t rows = map.values.size();
  const std::size_t cols = rows ? map.values[0].size() : 0;
  auto tv = [&](double v) { return map.log_scale ? std::log10(v) : v; };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : map.values)
    for (double v : row) {
      if (!std::isfinite(v) || (map.log_scale && v <= 0.0)) continue;
      lo = std::min(lo, tv(v));
      hi = std::max(hi, tv(v));
    }
  if (!(lo <= hi)) lo = 0, hi = 1;
  if (hi == lo) hi = lo + 1;
  const double pw = width - left - right, ph = height - top - bottom;
  const double cw = cols ? pw / static_cast<double>(cols) : pw;
  const double ch = rows ? ph / static_cast<double>(rows) : ph;

  std::ostringstream os;
  header(os, map.title);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols && c < map.values[r].size(); ++c) {
      const double v = map.values[r][c];
      const bool ok = std::isfinite(v) && (!map.log_scale || v > 0.0);
      const std::string fill = ok ? ramp((tv(v) - lo) / (hi - lo)) : std::string("#bbbbbb");
      os << "<rect x=\"" << num(left + cw * static_cast<double>(c)) << "\" y=\""
         << num(top + ph - ch * static_cast<double>(r + 1)) << "\" width=\"" << num(cw)
         << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\"/>\n";
    }
  for (std::size_t c = 0; c < map.col_labels.size() && c < cols; ++c)
    os << "<text x=\"" << num(left + cw * (static_cast<double>(c) + 0.5)) << "\" y=\""
       << num(top + ph + 15) << "\" text-anchor=\"middle\">" << escape(map.col_labels[c])
       << "</text>\n";
  for (std::size_t r = 0; r < map.row_labels.size() && r < rows; ++r)
    os << "<text x=\"" << num(left - 5) << "\" y=\""
       << num(top + ph - ch * (static_cast<double>(r) + 0.5) + 4) << "\" text-anchor=\"end\">"
       << escape(map.row_labels[r]) << "</text>\n";
  axis_labels(os, map.x_label, map.y_label);
  for (int i = 0; i <= 4; ++i) {
    const double Y = top + ph - ph * i / 4.0;
    os << "<rect x=\"" << num(width - right + 15) << "\" y=\"" << num(Y - ph / 4.0)
       << "\" width=\"20\" height=\"" << num(i < 4 ? ph / 4.0 : 0) << "\" fill=\""
       << ramp((i + 0.5) / 4.0) << "\"/>\n";
    os << "<text x=\"" << num(width - right + 40) << "\" y=\"" << num(Y + 4) << "\">"
       << (map.log_scale ? "1e" : "") << tick(lo + (hi - lo) * i / 4.0) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace silunet::svg
