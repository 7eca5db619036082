#pragma once

#include <string>
#include <vector>

namespace edgewise::cli {

struct Series {
  std::string label;
  std::vector<double> x, y;  // non-finite points break the line
  bool markers = false;
  bool dashed = false;
};

// horizontal segment [x0, x1] at height y
struct Segment {
  double x0 = 0, x1 = 0, y = 0;
};

struct Plot {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<Series> series;
  std::vector<Segment> segments;

  // Plain SVG 1.1, no scripts or timestamps; identical input gives identical bytes.
  std::string render(int width = 720, int height = 480) const;
};

void write_svg(const std::string& path, const Plot& p);

}  // namespace edgewise::cli
