#include "chaoslab/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace chaoslab::io {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLeft = 80, kRight = 160, kTop = 50, kBottom = 60;

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-300 ? 0.0 : v);
  return buf;
}

}  // namespace

std::string palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % 10];
}

std::string ramp(double t) {
  if (!std::isfinite(t)) return "#bbbbbb";
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(68 + t * (253 - 68)));
  const int g = static_cast<int>(std::lround(1 + t * (231 - 1)));
  const int b = static_cast<int>(std::lround(84 + t * (37 - 84)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

SvgFigure::SvgFigure(std::string title, std::string x_label, std::string y_label, int width, int height)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      width_(width),
      height_(height),
      xmin_(kInf),
      xmax_(-kInf),
      ymin_(kInf),
      ymax_(-kInf) {}

void SvgFigure::extend(double x, double y) {
  if (std::isfinite(x)) xmin_ = std::min(xmin_, x), xmax_ = std::max(xmax_, x);
  if (std::isfinite(y)) ymin_ = std::min(ymin_, y), ymax_ = std::max(ymax_, y);
}

void SvgFigure::polyline(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
                         std::size_t max_points) {
  Line line;
  line.color = color;
  const std::size_t n = std::min(x.size(), y.size());
  const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / std::max<std::size_t>(1, max_points));
  for (std::size_t i = 0; i < n; i += stride) {
    line.x.push_back(x[i]);
    line.y.push_back(y[i]);
    extend(x[i], y[i]);
  }
  lines_.push_back(std::move(line));
}

void SvgFigure::rect(double x0, double y0, double x1, double y1, const std::string& fill) {
  rects_.push_back({x0, y0, x1, y1, fill});
  extend(x0, y0);
  extend(x1, y1);
}

void SvgFigure::legend(const std::string& label, const std::string& color) { legend_.emplace_back(label, color); }

std::string SvgFigure::render() const {
  auto tx = [&](double x) { return log_x_ ? std::log10(x) : x; };
  double x0 = xmin_, x1 = xmax_, y0 = ymin_, y1 = ymax_;
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (log_x_ && x0 > 0) x0 = std::log10(x0), x1 = std::log10(x1);
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
  const double pw = width_ - kLeft - kRight, ph = height_ - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
     << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n"
     << "<text x=\"" << width_ / 2 << "\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title_)
     << "</text>\n";

  for (const auto& r : rects_) {
    const double ax = px(r.x0), bx = px(r.x1), ay = py(r.y1), by = py(r.y0);
    os << "<rect x=\"" << coord(std::min(ax, bx)) << "\" y=\"" << coord(std::min(ay, by)) << "\" width=\""
       << coord(std::abs(bx - ax)) << "\" height=\"" << coord(std::abs(by - ay)) << "\" fill=\"" << r.fill
       << "\"/>\n";
  }
  for (const auto& l : lines_) {
    os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < l.x.size(); ++i) {
      if (!std::isfinite(l.x[i]) || !std::isfinite(l.y[i])) continue;
      os << (first ? "" : " ") << coord(px(l.x[i])) << ',' << coord(py(l.y[i]));
      first = false;
    }
    os << "\"/>\n";
  }

  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x0 + (x1 - x0) * i / 5.0, fy = y0 + (y1 - y0) * i / 5.0;
    const double sx = kLeft + pw * i / 5.0, sy = kTop + ph - ph * i / 5.0;
    os << "<line x1=\"" << coord(sx) << "\" y1=\"" << kTop + ph << "\" x2=\"" << coord(sx) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << coord(sx) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << tick_label(log_x_ ? std::pow(10.0, fx) : fx) << "</text>\n"
       << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << coord(sy) << "\" x2=\"" << kLeft << "\" y2=\"" << coord(sy)
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << kLeft - 8 << "\" y=\"" << coord(sy + 4) << "\" text-anchor=\"end\">" << tick_label(fy)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << height_ - 15 << "\" text-anchor=\"middle\">"
     << xml_escape(x_label_) << "</text>\n"
     << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << xml_escape(y_label_) << "</text>\n";
  for (std::size_t i = 0; i < legend_.size(); ++i) {
    const int y = kTop + 10 + 18 * static_cast<int>(i);
    os << "<rect x=\"" << width_ - kRight + 15 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
       << legend_[i].second << "\"/>\n"
       << "<text x=\"" << width_ - kRight + 30 << "\" y=\"" << y << "\">" << xml_escape(legend_[i].first)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace chaoslab::io
