#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cli {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

struct LinePlot {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<Series> series;
};

// Cell values on an x-by-y grid, index = iy * x.size() + ix. With a palette the
// values are category indices into it; otherwise they are shaded on a grey ramp.
struct Heatmap {
  std::string title, xlabel, ylabel;
  std::vector<double> x, y;
  std::vector<double> values;
  bool logy = false;
  std::vector<std::string> palette;
  std::vector<std::string> legend;
};

void write_svg(const std::filesystem::path& path, const LinePlot& plot);
void write_svg(const std::filesystem::path& path, const Heatmap& map);

}  // namespace cli
