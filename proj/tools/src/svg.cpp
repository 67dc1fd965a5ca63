#include "cmosb_cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cmosb::cli {

namespace {

constexpr double kWidth = 520;
constexpr double kHeight = 380;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 55;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo;
  double hi;

  static Axis fit(std::vector<double> v) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    double pad = (hi - lo) * 0.08;
    if (pad <= 0.0) pad = std::max(std::abs(lo) * 0.1, 0.05);
    return {lo - pad, hi + pad};
  }
};

class Frame {
 public:
  Frame(Axis x, Axis y) : x_(x), y_(y) {}

  double sx(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double sy(double v) const {
    return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
  }

  void open(std::ostringstream& o, const std::string& title, const std::string& xl,
            const std::string& yl) const {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << px(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    o << "<rect x=\"" << px(x0) << "\" y=\"" << px(y1) << "\" width=\"" << px(x1 - x0) << "\" height=\""
      << px(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double vx = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double vy = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      o << "<line x1=\"" << px(sx(vx)) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(sx(vx)) << "\" y2=\""
        << px(y0 + 5) << "\" stroke=\"black\"/>\n";
      o << "<text x=\"" << px(sx(vx)) << "\" y=\"" << px(y0 + 18) << "\" text-anchor=\"middle\">" << num(vx)
        << "</text>\n";
      o << "<line x1=\"" << px(x0 - 5) << "\" y1=\"" << px(sy(vy)) << "\" x2=\"" << px(x0) << "\" y2=\""
        << px(sy(vy)) << "\" stroke=\"black\"/>\n";
      o << "<text x=\"" << px(x0 - 8) << "\" y=\"" << px(sy(vy) + 4) << "\" text-anchor=\"end\">" << num(vy)
        << "</text>\n";
    }
    o << "<text class=\"x-label\" x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
    o << "<text class=\"y-label\" x=\"16\" y=\"" << px((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << px((y0 + y1) / 2) << ")\">" << escape(yl) << "</text>\n";
  }

 private:
  Axis x_;
  Axis y_;
};

const char* const kShapes[] = {"square", "triangle", "diamond", "cross"};
const char* const kColors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b"};

void marker(std::ostringstream& o, int shape, double x, double y, const char* color) {
  const double r = 6;
  switch (shape % 4) {
    case 0:
      o << "<rect class=\"baseline\" x=\"" << px(x - r) << "\" y=\"" << px(y - r) << "\" width=\"" << px(2 * r)
        << "\" height=\"" << px(2 * r) << "\" fill=\"" << color << "\"/>\n";
      break;
    case 1:
      o << "<polygon class=\"baseline\" points=\"" << px(x) << ',' << px(y - r) << ' ' << px(x + r) << ','
        << px(y + r) << ' ' << px(x - r) << ',' << px(y + r) << "\" fill=\"" << color << "\"/>\n";
      break;
    case 2:
      o << "<polygon class=\"baseline\" points=\"" << px(x) << ',' << px(y - r) << ' ' << px(x + r) << ','
        << px(y) << ' ' << px(x) << ',' << px(y + r) << ' ' << px(x - r) << ',' << px(y) << "\" fill=\""
        << color << "\"/>\n";
      break;
    default:
      o << "<path class=\"baseline\" d=\"M" << px(x - r) << ' ' << px(y - r) << " L" << px(x + r) << ' '
        << px(y + r) << " M" << px(x + r) << ' ' << px(y - r) << " L" << px(x - r) << ' ' << px(y + r)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
  }
}

}  // namespace

std::string render_svg(const ScatterPlot& plot) {
  std::vector<double> xs, ys;
  for (const auto& [x, y] : plot.points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  for (const auto& b : plot.baselines) {
    xs.push_back(b.x);
    ys.push_back(b.y);
  }
  if (xs.empty()) xs = ys = {0.0, 1.0};
  const Frame frame(Axis::fit(xs), Axis::fit(ys));
  std::ostringstream o;
  frame.open(o, plot.title, plot.x_label, plot.y_label);
  for (const auto& [x, y] : plot.points)
    o << "<circle class=\"solution\" cx=\"" << px(frame.sx(x)) << "\" cy=\"" << px(frame.sy(y))
      << "\" r=\"4\" fill=\"#1f77b4\" fill-opacity=\"0.8\"/>\n";
  double ly = kTop + 10;
  const double lx = kWidth - kRight + 20;
  if (!plot.points.empty()) {
    o << "<circle cx=\"" << px(lx) << "\" cy=\"" << px(ly) << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    o << "<text x=\"" << px(lx + 12) << "\" y=\"" << px(ly + 4) << "\">front</text>\n";
    ly += 20;
  }
  for (std::size_t i = 0; i < plot.baselines.size(); ++i) {
    const auto& b = plot.baselines[i];
    const char* color = kColors[i % 4];
    marker(o, static_cast<int>(i), frame.sx(b.x), frame.sy(b.y), color);
    marker(o, static_cast<int>(i), lx, ly, color);
    o << "<text x=\"" << px(lx + 12) << "\" y=\"" << px(ly + 4) << "\" data-shape=\"" << kShapes[i % 4] << "\">"
      << escape(b.name) << "</text>\n";
    ly += 20;
  }
  o << "</svg>\n";
  return o.str();
}

std::string render_svg(const LinePlot& plot) {
  std::vector<double> xs, ys;
  for (const auto& [x, y] : plot.points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.empty()) xs = ys = {0.0, 1.0};
  const Frame frame(Axis::fit(xs), Axis::fit(ys));
  std::ostringstream o;
  frame.open(o, plot.title, plot.x_label, plot.y_label);
  if (!plot.points.empty()) {
    o << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < plot.points.size(); ++i)
      o << (i ? " " : "") << px(frame.sx(plot.points[i].first)) << ',' << px(frame.sy(plot.points[i].second));
    o << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace cmosb::cli
