#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cli {

namespace {

constexpr double kW = 720, kH = 480, kL = 80, kR = 160, kT = 40, kB = 60;
const char* kColors[] = {"#1f4e9c", "#c0392b", "#27864a", "#8e44ad", "#d68910", "#555555"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string f(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

std::string tick_label(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double p0 = 0, p1 = 1;  // pixel positions of lo and hi

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo, h = log ? std::log10(hi) : hi;
    return p0 + (a - l) / (h - l) * (p1 - p0);
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1.0) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) t.push_back(v);
      }
      return t;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
      t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  }
};

Axis make_axis(std::vector<double> vals, bool log, double p0, double p1) {
  Axis a;
  a.log = log;
  a.p0 = p0;
  a.p1 = p1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : vals) {
    if (!std::isfinite(v) || (log && v <= 0)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = log ? 1.0 : 0.0, hi = log ? 10.0 : 1.0;
  if (hi <= lo) {
    const double pad = log ? 0 : std::max(1e-12, std::abs(lo) * 0.1);
    if (log) lo /= 2, hi = lo * 4;
    else lo -= pad, hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

void frame(std::ostream& os, const Axis& ax, const Axis& ay, const std::string& title,
           const std::string& xl, const std::string& yl) {
  os << "<rect x='" << kL << "' y='" << kT << "' width='" << kW - kL - kR << "' height='"
     << kH - kT - kB << "' fill='none' stroke='black'/>\n";
  for (double t : ax.ticks()) {
    const double px = ax.map(t);
    os << "<line x1='" << f(px) << "' y1='" << kH - kB << "' x2='" << f(px) << "' y2='"
       << kH - kB + 5 << "' stroke='black'/>\n<text x='" << f(px) << "' y='" << kH - kB + 18
       << "' font-size='11' text-anchor='middle'>" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t);
    os << "<line x1='" << kL - 5 << "' y1='" << f(py) << "' x2='" << kL << "' y2='" << f(py)
       << "' stroke='black'/>\n<text x='" << kL - 8 << "' y='" << f(py + 4)
       << "' font-size='11' text-anchor='end'>" << tick_label(t) << "</text>\n";
  }
  os << "<text x='" << (kL + kW - kR) / 2 << "' y='" << kT - 14
     << "' font-size='14' text-anchor='middle'>" << esc(title) << "</text>\n";
  os << "<text x='" << (kL + kW - kR) / 2 << "' y='" << kH - 18
     << "' font-size='12' text-anchor='middle'>" << esc(xl) << "</text>\n";
  os << "<text x='18' y='" << (kT + kH - kB) / 2 << "' font-size='12' text-anchor='middle' "
     << "transform='rotate(-90 18 " << (kT + kH - kB) / 2 << ")'>" << esc(yl) << "</text>\n";
}

void open_svg(std::ostream& os) {
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
     << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
}

}  // namespace

void write_svg(const std::filesystem::path& path, const LinePlot& plot) {
  std::vector<double> xs, ys;
  for (const auto& s : plot.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis ax = make_axis(xs, plot.logx, kL, kW - kR);
  const Axis ay = make_axis(ys, plot.logy, kH - kB, kT);
  std::ofstream os(path);
  open_svg(os);
  frame(os, ax, ay, plot.title, plot.xlabel, plot.ylabel);
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::ostringstream pts;
    bool open = false;
    auto flush = [&] {
      if (open)
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5'"
           << (s.dashed ? " stroke-dasharray='6 4'" : "") << " points='" << pts.str() << "'/>\n";
      pts.str("");
      open = false;
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) &&
                      !(plot.logx && s.x[i] <= 0) && !(plot.logy && s.y[i] <= 0);
      if (!ok) {
        flush();
        continue;
      }
      pts << f(ax.map(s.x[i])) << ',' << f(ay.map(s.y[i])) << ' ';
      open = true;
    }
    flush();
    const double ly = kT + 10 + 18.0 * static_cast<double>(k);
    os << "<line x1='" << kW - kR + 10 << "' y1='" << ly << "' x2='" << kW - kR + 34 << "' y2='"
       << ly << "' stroke='" << color << "' stroke-width='2'"
       << (s.dashed ? " stroke-dasharray='6 4'" : "") << "/>\n<text x='" << kW - kR + 40
       << "' y='" << ly + 4 << "' font-size='11'>" << esc(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

void write_svg(const std::filesystem::path& path, const Heatmap& map) {
  const Axis ax = make_axis(map.x, false, kL, kW - kR);
  const Axis ay = make_axis(map.y, map.logy, kH - kB, kT);
  std::ofstream os(path);
  open_svg(os);
  const std::size_t nx = map.x.size(), ny = map.y.size();
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (double v : map.values)
    if (std::isfinite(v)) vmin = std::min(vmin, v), vmax = std::max(vmax, v);
  // Cell edges at midpoints between grid nodes.
  auto edge = [](const std::vector<double>& g, std::size_t i, bool log) {
    auto tr = [&](double v) { return log ? std::log10(v) : v; };
    auto inv = [&](double v) { return log ? std::pow(10.0, v) : v; };
    if (g.size() == 1) return g[0];
    if (i == 0) return inv(tr(g[0]) - 0.5 * (tr(g[1]) - tr(g[0])));
    if (i == g.size()) return inv(tr(g[i - 1]) + 0.5 * (tr(g[i - 1]) - tr(g[i - 2])));
    return inv(0.5 * (tr(g[i - 1]) + tr(g[i])));
  };
  Axis cx = ax, cy = ay;
  cx.lo = edge(map.x, 0, false), cx.hi = edge(map.x, nx, false);
  cy.lo = edge(map.y, 0, map.logy), cy.hi = edge(map.y, ny, map.logy);
  for (std::size_t j = 0; j < ny; ++j) {
    const double y0 = cy.map(edge(map.y, j, map.logy)), y1 = cy.map(edge(map.y, j + 1, map.logy));
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = map.values[j * nx + i];
      std::string fill = "#ffffff";
      if (!map.palette.empty()) {
        const auto k = static_cast<std::size_t>(std::max(0.0, v));
        fill = map.palette[std::min(k, map.palette.size() - 1)];
      } else if (std::isfinite(v) && vmax > vmin) {
        const int g = static_cast<int>(std::lround(235.0 - 200.0 * (v - vmin) / (vmax - vmin)));
        char b[8];
        std::snprintf(b, sizeof b, "#%02x%02x%02x", g, g, g);
        fill = b;
      } else if (!std::isfinite(v)) {
        fill = "#f4d03f";
      }
      const double x0 = cx.map(edge(map.x, i, false)), x1 = cx.map(edge(map.x, i + 1, false));
      os << "<rect x='" << f(x0) << "' y='" << f(y1) << "' width='" << f(x1 - x0 + 0.3)
         << "' height='" << f(y0 - y1 + 0.3) << "' fill='" << fill << "'/>\n";
    }
  }
  frame(os, cx, cy, map.title, map.xlabel, map.ylabel);
  for (std::size_t k = 0; k < map.legend.size() && k < map.palette.size(); ++k) {
    const double ly = kT + 10 + 18.0 * static_cast<double>(k);
    os << "<rect x='" << kW - kR + 10 << "' y='" << ly - 6 << "' width='14' height='12' fill='"
       << map.palette[k] << "' stroke='black'/>\n<text x='" << kW - kR + 30 << "' y='" << ly + 4
       << "' font-size='11'>" << esc(map.legend[k]) << "</text>\n";
  }
  if (map.palette.empty() && std::isfinite(vmin))
    os << "<text x='" << kW - kR + 10 << "' y='" << kT + 14 << "' font-size='11'>grey: "
       << tick_label(vmin) << " (light) to " << tick_label(vmax) << "</text>\n";
  os << "</svg>\n";
}

}  // namespace cli
