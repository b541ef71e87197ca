#include "krr/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "krr/errors.hpp"

namespace krr::svg {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void absorb(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Round tick label: keep it short.
std::string tick_label(double v, bool log_axis) {
  std::ostringstream os;
  os.precision(log_axis ? 4 : 3);
  os << (log_axis ? std::exp(v) : v);
  return os.str();
}

}  // namespace

void write_line_chart(const std::string& path,
                      const std::vector<Series>& series,
                      const ChartOptions& opt) {
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double W = opt.width, H = opt.height;
  const double pw = W - ml - mr, ph = H - mt - mb;

  auto tx = [&](double v) { return opt.log_x ? std::log(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log(v) : v; };

  Range rx, ry;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((opt.log_x && s.x[i] <= 0) || (opt.log_y && s.y[i] <= 0)) continue;
      rx.absorb(tx(s.x[i]));
      ry.absorb(ty(s.y[i]));
    }
  if (!(rx.lo <= rx.hi) || !(ry.lo <= ry.hi))
    throw ArgumentError("svg chart: no plottable points");
  if (rx.hi == rx.lo) rx.hi = rx.lo + 1;
  if (ry.hi == ry.lo) ry.hi = ry.lo + 1;

  auto px = [&](double v) { return ml + (tx(v) - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) {
    return mt + ph - (ty(v) - ry.lo) / (ry.hi - ry.lo) * ph;
  };

  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open output file: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
      << "' height='" << H << "' viewBox='0 0 " << W << " " << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='22' text-anchor='middle' "
      << "font-family='sans-serif' font-size='15'>" << opt.title
      << "</text>\n";

  // Axes box and ticks.
  out << "<rect x='" << ml << "' y='" << mt << "' width='" << pw
      << "' height='" << ph << "' fill='none' stroke='#444'/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    double fx = rx.lo + (rx.hi - rx.lo) * i / n_ticks;
    double fy = ry.lo + (ry.hi - ry.lo) * i / n_ticks;
    double sx = ml + pw * i / n_ticks;
    double sy = mt + ph - ph * i / n_ticks;
    out << "<line x1='" << sx << "' y1='" << mt + ph << "' x2='" << sx
        << "' y2='" << mt + ph + 5 << "' stroke='#444'/>\n";
    out << "<text x='" << sx << "' y='" << mt + ph + 20
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << tick_label(fx, opt.log_x) << "</text>\n";
    out << "<line x1='" << ml - 5 << "' y1='" << sy << "' x2='" << ml
        << "' y2='" << sy << "' stroke='#444'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << sy + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
        << tick_label(fy, opt.log_y) << "</text>\n";
  }
  out << "<text x='" << ml + pw / 2 << "' y='" << H - 10
      << "' text-anchor='middle' font-family='sans-serif' font-size='13'>"
      << opt.x_label << "</text>\n";
  out << "<text x='18' y='" << mt + ph / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='13' "
      << "transform='rotate(-90 18 " << mt + ph / 2 << ")'>" << opt.y_label
      << "</text>\n";

  double legend_y = mt + 14;
  for (const auto& s : series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((opt.log_x && s.x[i] <= 0) || (opt.log_y && s.y[i] <= 0)) continue;
      pts << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='2'"
        << (s.dashed ? " stroke-dasharray='6,4'" : "") << " points='"
        << pts.str() << "'/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((opt.log_x && s.x[i] <= 0) || (opt.log_y && s.y[i] <= 0)) continue;
      out << "<circle cx='" << num(px(s.x[i])) << "' cy='" << num(py(s.y[i]))
          << "' r='3' fill='" << s.color << "'/>\n";
    }
    out << "<line x1='" << ml + pw - 150 << "' y1='" << legend_y << "' x2='"
        << ml + pw - 125 << "' y2='" << legend_y << "' stroke='" << s.color
        << "' stroke-width='2'" << (s.dashed ? " stroke-dasharray='6,4'" : "")
        << "/>\n";
    out << "<text x='" << ml + pw - 120 << "' y='" << legend_y + 4
        << "' font-family='sans-serif' font-size='12'>" << s.label
        << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
  if (!out) throw ArgumentError("write failed: " + path);
}

}  // namespace krr::svg
