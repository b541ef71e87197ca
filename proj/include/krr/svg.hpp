#pragma once

#include <string>
#include <vector>

namespace krr::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 440;
};

/// Write a static line chart. Nonpositive values are dropped on log axes.
void write_line_chart(const std::string& path,
                      const std::vector<Series>& series,
                      const ChartOptions& options);

}  // namespace krr::svg
