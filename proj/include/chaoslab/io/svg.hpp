#pragma once

#include <string>
#include <vector>

namespace chaoslab::io {

/// Minimal SVG figure: polylines and filled rectangles in data coordinates,
/// plus a frame with ticks. Data ranges grow to fit everything added.
class SvgFigure {
 public:
  SvgFigure(std::string title, std::string x_label, std::string y_label, int width = 800, int height = 600);

  /// Long series are thinned to at most `max_points` vertices.
  void polyline(const std::vector<double>& x, const std::vector<double>& y, const std::string& color = "#1f77b4",
                std::size_t max_points = 20000);
  void rect(double x0, double y0, double x1, double y1, const std::string& fill);
  void legend(const std::string& label, const std::string& color);
  void log_x(bool on = true) { log_x_ = on; }

  std::string render() const;

 private:
  struct Line {
    std::vector<double> x, y;
    std::string color;
  };
  struct Rect {
    double x0, y0, x1, y1;
    std::string fill;
  };

  void extend(double x, double y);

  std::string title_, x_label_, y_label_;
  int width_, height_;
  bool log_x_ = false;
  double xmin_, xmax_, ymin_, ymax_;
  std::vector<Line> lines_;
  std::vector<Rect> rects_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

/// Categorical palette (cycles after 10 entries).
std::string palette(std::size_t i);
/// Blue-to-yellow ramp for t in [0, 1]; NaN maps to grey.
std::string ramp(double t);
/// Escapes &, <, > and quotes for text nodes and attributes.
std::string xml_escape(const std::string& s);

}  // namespace chaoslab::io
