#pragma once

#include <string>
#include <vector>

namespace vsd::svg {

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
  bool line = false;  // polyline instead of scatter
  double radius = 2.5;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 640;
  int height = 480;
};

// Deterministic text output: same plot, same bytes.
std::string render(const Plot& plot);
void write(const std::string& path, const Plot& plot);

}  // namespace vsd::svg
