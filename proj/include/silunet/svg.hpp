#pragma once

#include <string>
#include <vector>

namespace silunet::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Plot log10(y); nonpositive values are skipped.
  bool log_y = false;
  std::vector<Series> series;
};

/// Cell (r, c) has value values[r][c]; rows run bottom to top.
struct Heatmap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> col_labels;
  std::vector<std::string> row_labels;
  std::vector<std::vector<double>> values;
  /// Color by log10 of the value; NaN cells are drawn grey.
  bool log_scale = true;
};

std::string render(const LinePlot& plot);
std::string render(const Heatmap& map);

/// Writes text to path; IoError on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace silunet::svg
