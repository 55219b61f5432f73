#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epinet::cli {

namespace {

constexpr int kWidth = 960;
constexpr int kHeight = 540;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

// Rounds a raw interval to a 1/2/5 tick spacing.
double nice_step(double span, int ticks) {
  const double raw = span / std::max(ticks, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  if (norm <= 1.0) return mag;
  if (norm <= 2.0) return 2.0 * mag;
  if (norm <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string render_svg(const Trajectory& traj, const std::string& title) {
  const double t_min = traj.times.front();
  const double t_max = traj.times.back();
  double y_max = 0.0;
  for (const auto& row : traj.states)
    for (double v : row) y_max = std::max(y_max, v);
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double t) {
    return kMarginLeft + (t - t_min) / (t_max - t_min) * plot_w;
  };
  const auto sy = [&](double y) {
    return kMarginTop + plot_h - y / y_max * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  // axes
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
      << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\""
      << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop
      << "\" x2=\"" << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";

  const double tx = nice_step(t_max - t_min, 8);
  for (double t = std::ceil(t_min / tx) * tx; t <= t_max + 1e-9; t += tx) {
    svg << "<line x1=\"" << sx(t) << "\" y1=\"" << kMarginTop + plot_h
        << "\" x2=\"" << sx(t) << "\" y2=\"" << kMarginTop + plot_h + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx(t) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(t) << "</text>\n";
  }
  const double ty = nice_step(y_max, 6);
  for (double y = 0.0; y <= y_max + 1e-9; y += ty) {
    svg << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << sy(y)
        << "\" x2=\"" << kMarginLeft << "\" y2=\"" << sy(y)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kMarginLeft - 9 << "\" y=\"" << sy(y) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(y) << "</text>\n";
  }
  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
      << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">t</text>\n";
  svg << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << kMarginTop + plot_h / 2 << ")\">population</text>\n";

  // one polyline per component, thinned to at most ~2000 points
  const std::size_t m = traj.samples();
  const std::size_t stride = std::max<std::size_t>(1, m / 2000);
  const int n = static_cast<int>(traj.labels.size());
  for (int c = 0; c < n; ++c) {
    svg << "<polyline fill=\"none\" stroke=\""
        << kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < m; k += stride) {
      svg << fmt(sx(traj.times[k])) << "," << fmt(sy(traj.states[k][c]))
          << " ";
    }
    // always close with the final sample
    svg << fmt(sx(traj.times[m - 1])) << ","
        << fmt(sy(traj.states[m - 1][c]));
    svg << "\"/>\n";
  }

  // legend
  const double lx = kMarginLeft + plot_w + 16;
  for (int c = 0; c < n; ++c) {
    const double ly = kMarginTop + 14 + 20.0 * c;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\""
        << lx + 22 << "\" y2=\"" << ly - 4 << "\" stroke=\""
        << kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))]
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << lx + 28 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << traj.labels[c] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace epinet::cli
