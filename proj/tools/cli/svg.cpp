#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "edgewise/errors.hpp"

namespace edgewise::cli {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v, const char* fmt = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;
  void fit(double v) {
    if (!std::isfinite(v) || (log && v <= 0)) return;
    double t = log ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0); }
  double map(double v, double a, double b) const {
    double t = log ? std::log10(v) : v;
    return a + (t - lo) / (hi - lo) * (b - a);
  }
  void finish() {
    if (lo > hi) lo = 0, hi = 1;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) lo -= 0.5, hi += 0.5;
    double pad = 0.04 * (hi - lo);
    if (log) {
      lo = std::floor(lo), hi = std::ceil(hi);
    } else {
      lo -= pad, hi += pad;
    }
  }
  // tick positions in data units
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::ceil(lo); e <= hi + 1e-9; e += 1) t.push_back(std::pow(10.0, e));
      return t;
    }
    double raw = (hi - lo) / 5, mag = std::pow(10.0, std::floor(std::log10(raw))), step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0 : v);
    return t;
  }
};

}  // namespace

std::string Plot::render(int width, int height) const {
  const double ml = 72, mr = 150, mt = 36, mb = 52;
  const double x0 = ml, x1 = width - mr, y0 = height - mb, y1 = mt;
  Axis ax, ay;
  ax.log = logx;
  ay.log = logy;
  ax.lo = ay.lo = INFINITY;
  ax.hi = ay.hi = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) ax.fit(s.x[i]), ay.fit(s.y[i]);
  for (const auto& g : segments) ax.fit(g.x0), ax.fit(g.x1), ay.fit(g.y);
  ax.finish();
  ay.finish();

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
    << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto label = [](double v, bool log) { return log ? "1e" + num(std::log10(v), "%.0f") : num(v, "%.4g"); };
  for (double t : ax.ticks()) {
    double px = ax.map(t, x0, x1);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px) << "\" y2=\"" << num(y0 + 5)
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">" << label(t, logx)
      << "</text>\n";
  }
  for (double t : ay.ticks()) {
    double py = ay.map(t, y0, y1);
    o << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py)
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << label(t, logy)
      << "</text>\n";
  }
  o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << escape(xlabel)
    << "</text>\n";
  o << "<text transform=\"translate(16," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(ylabel) << "</text>\n";

  if (!segments.empty()) {
    o << "<g stroke=\"" << kColors[0] << "\" stroke-width=\"1\">\n";
    for (const auto& g : segments) {
      if (!ax.usable(g.x0) || !ax.usable(g.x1) || !ay.usable(g.y)) continue;
      double py = ay.map(g.y, y0, y1);
      double a = ax.map(g.x0, x0, x1), b = std::max(ax.map(g.x1, x0, x1), a + 0.5);
      o << "<line x1=\"" << num(a) << "\" y1=\"" << num(py) << "\" x2=\"" << num(b) << "\" y2=\"" << num(py)
        << "\"/>\n";
    }
    o << "</g>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = kColors[k % 8];
    std::string d;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
        pen = false;
        continue;
      }
      d += (pen ? " L" : " M") + num(ax.map(s.x[i], x0, x1)) + " " + num(ay.map(s.y[i], y0, y1));
      pen = true;
    }
    if (!d.empty())
      o << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (ax.usable(s.x[i]) && ay.usable(s.y[i]))
          o << "<circle cx=\"" << num(ax.map(s.x[i], x0, x1)) << "\" cy=\"" << num(ay.map(s.y[i], y0, y1))
            << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
    double ly = y1 + 14 + 18 * k;
    o << "<line x1=\"" << num(x1 + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(x1 + 30) << "\" y2=\"" << num(ly)
      << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(x1 + 36) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::string& path, const Plot& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << p.render();
}

}  // namespace edgewise::cli
