#pragma once

#include <string>
#include <vector>

// Minimal self-contained SVG charts for the training and evaluation reports.
namespace gcnet::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Box {
  std::string label;
  std::vector<double> values;  // non-finite entries are skipped and counted in the label
};

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_y);

/// Box plots side by side (whiskers at the 5th and 95th percentiles, box at the quartiles).
std::string box_plot(const std::string& title, const std::string& y_label, const std::vector<Box>& boxes,
                     bool log_y);

}  // namespace gcnet::svg
