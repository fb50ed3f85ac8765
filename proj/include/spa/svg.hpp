#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spa {

/// Minimal line chart written as standalone SVG: axes with ticks, one
/// polyline per series and a legend.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_series(std::string name, std::vector<double> x, std::vector<double> y);
  /// Fix the y range (otherwise taken from the data).
  void set_y_range(double lo, double hi);

  void render(std::ostream& os) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
  };
  std::string title_;
  std::string x_label_;
  std::string y_label_;
  std::vector<Series> series_;
  bool fixed_y_ = false;
  double y_lo_ = 0.0;
  double y_hi_ = 1.0;
};

}  // namespace spa
