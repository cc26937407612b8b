#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "dykls/runner.hpp"

namespace dykls {

namespace {

struct Series {
  std::vector<std::pair<double, double>> pts;
  const char* color;
  const char* label;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void draw_panel(std::ofstream& out, double px, double py, double pw, double ph,
                const std::string& title, const std::string& ylabel,
                const std::vector<Series>& series) {
  const double ml = 58, mr = 12, mt = 28, mb = 40;
  const double x0 = px + ml, y0 = py + mt;
  const double w = pw - ml - mr, h = ph - mt - mb;

  double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;

  auto sx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * w; };
  auto sy = [&](double y) { return y0 + h - (y - ymin) / (ymax - ymin) * h; };

  out << "<rect x='" << x0 << "' y='" << y0 << "' width='" << w
      << "' height='" << h << "' fill='none' stroke='black'/>\n";
  out << "<text x='" << px + pw / 2 << "' y='" << py + 16
      << "' text-anchor='middle' font-size='13'>" << title << "</text>\n";
  out << "<text x='" << x0 + w / 2 << "' y='" << y0 + h + 30
      << "' text-anchor='middle' font-size='11'>sweep n</text>\n";
  out << "<text x='" << px + 14 << "' y='" << y0 + h / 2
      << "' text-anchor='middle' font-size='11' transform='rotate(-90 "
      << px + 14 << " " << y0 + h / 2 << ")'>" << ylabel << "</text>\n";

  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    out << "<line x1='" << sx(xv) << "' y1='" << y0 + h << "' x2='" << sx(xv)
        << "' y2='" << y0 + h + 4 << "' stroke='black'/>\n"
        << "<text x='" << sx(xv) << "' y='" << y0 + h + 16
        << "' text-anchor='middle' font-size='10'>" << fmt(xv) << "</text>\n";
    out << "<line x1='" << x0 - 4 << "' y1='" << sy(yv) << "' x2='" << x0
        << "' y2='" << sy(yv) << "' stroke='black'/>\n"
        << "<text x='" << x0 - 6 << "' y='" << sy(yv) + 3
        << "' text-anchor='end' font-size='10'>" << fmt(yv) << "</text>\n";
  }

  double ly = y0 + 14;
  for (const auto& s : series) {
    if (s.pts.empty()) continue;
    out << "<polyline fill='none' stroke='" << s.color
        << "' stroke-width='1.2' points='";
    for (const auto& [x, y] : s.pts) out << sx(x) << "," << sy(y) << " ";
    out << "'/>\n";
    out << "<line x1='" << x0 + w - 90 << "' y1='" << ly << "' x2='"
        << x0 + w - 70 << "' y2='" << ly << "' stroke='" << s.color
        << "' stroke-width='1.5'/>\n"
        << "<text x='" << x0 + w - 64 << "' y='" << ly + 3
        << "' font-size='10'>" << s.label << "</text>\n";
    ly += 14;
  }
}

std::vector<std::pair<double, double>> map_y(
    const std::vector<std::pair<double, double>>& in, double (*f)(double)) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [x, y] : in) out.emplace_back(x, f(y));
  return out;
}

}  // namespace

void write_plot_svg(const std::string& path,
                    const std::vector<TraceRecord>& records) {
  const auto gap = positive_prefix(sweep_series(records, "gap"));
  const auto err = positive_prefix(sweep_series(records, "err"));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const double pw = 480, ph = 400;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << 3 * pw
      << "' height='" << ph << "' font-family='sans-serif'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";

  draw_panel(out, 0, 0, pw, ph, "semilog duality gap and error",
             "log10(value)",
             {{map_y(gap, [](double y) { return std::log10(y); }), "#1f77b4",
               "gap"},
              {map_y(err, [](double y) { return std::log10(y); }), "#ff7f0e",
               "err"}});
  draw_panel(out, pw, 0, pw, ph, "reciprocal duality gap", "1 / gap",
             {{map_y(gap, [](double y) { return 1.0 / y; }), "#1f77b4",
               "1/gap"}});
  draw_panel(out, 2 * pw, 0, pw, ph, "inverse-sqrt error", "err^(-1/2)",
             {{map_y(err, [](double y) { return 1.0 / std::sqrt(y); }),
               "#ff7f0e", "err^-1/2"}});
  out << "</svg>\n";
}

}  // namespace dykls
