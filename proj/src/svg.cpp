#include "svplab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace svplab {

namespace {

/// Fixed two-decimal pixel coordinates keep the byte stream stable.
std::string px(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  double map(double value, double pixel_lo, double pixel_hi) const {
    const double t = (value - lo) / (hi - lo);
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }
};

void polyline(std::ostringstream& out, const std::vector<double>& xs,
              const std::vector<double>& ys, const Range& x_range,
              const Range& y_range, double left, double right, double top,
              double bottom, const char* color, double width) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << width << "\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out << ' ';
    out << px(x_range.map(xs[i], left, right)) << ','
        << px(y_range.map(ys[i], bottom, top));
  }
  out << "\"/>\n";
}

}  // namespace

std::string render_figure1_svg(const std::vector<Figure1Panel>& panels) {
  if (panels.empty())
    throw std::invalid_argument("render_figure1_svg: no panels");
  const double panel_width = 640.0;
  const double panel_height = 220.0;
  const double margin = 46.0;
  const double gap = 26.0;
  const double total_height =
      margin + panels.size() * panel_height + (panels.size() - 1) * gap +
      margin;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << panel_width + 2 * margin << "\" height=\"" << total_height
      << "\" viewBox=\"0 0 " << panel_width + 2 * margin << ' '
      << total_height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Figure1Panel& panel = panels[p];
    const double top = margin + p * (panel_height + gap);
    const double bottom = top + panel_height;
    const double left = margin;
    const double right = margin + panel_width;

    double lo = -1.0;
    double hi = 1.0;
    for (const auto* curve :
         {&panel.eta_star, &panel.eta_mni, &panel.eta_svm}) {
      for (const double v : *curve) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    const double pad = 0.05 * (hi - lo);
    const Range y_range{lo - pad, hi + pad};
    const Range x_range{0.0, 1.0};

    out << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\""
        << px(panel_width) << "\" height=\"" << px(panel_height)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // Zero line for orientation.
    const double zero_y = y_range.map(0.0, bottom, top);
    out << "<line x1=\"" << px(left) << "\" y1=\"" << px(zero_y)
        << "\" x2=\"" << px(right) << "\" y2=\"" << px(zero_y)
        << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";

    polyline(out, panel.grid_x, panel.eta_star, x_range, y_range, left, right,
             top, bottom, "#111111", 1.4);
    polyline(out, panel.grid_x, panel.eta_mni, x_range, y_range, left, right,
             top, bottom, "#1f77b4", 1.2);
    polyline(out, panel.grid_x, panel.eta_svm, x_range, y_range, left, right,
             top, bottom, "#d62728", 1.0);

    for (std::size_t i = 0; i < panel.sample.x.size(); ++i) {
      const double cx = x_range.map(panel.sample.x[i], left, right);
      const double cy = y_range.map(panel.sample.y[i], bottom, top);
      const char* color = panel.sample.y[i] > 0 ? "#2ca02c" : "#9467bd";
      out << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(cy)
          << "\" r=\"2.2\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
    }

    out << "<text x=\"" << px(left + 8) << "\" y=\"" << px(top + 16)
        << "\" font-family=\"sans-serif\" font-size=\"13\">q = "
        << panel.q << (panel.svp ? " (all points support)" : "")
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_heatmap_svg(const HeatmapResult& result) {
  if (result.cells.empty())
    throw std::invalid_argument("render_heatmap_svg: empty result");
  const double cell_size = 18.0;
  const double margin = 54.0;
  const double width = margin + result.r_grid.size() * cell_size + margin;
  const double height = margin + result.q_grid.size() * cell_size + margin;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // q increases upward: row 0 (lowest q) is drawn at the bottom.
  for (std::size_t ri = 0; ri < result.r_grid.size(); ++ri) {
    for (std::size_t qi = 0; qi < result.q_grid.size(); ++qi) {
      const HeatmapCell& cell =
          result.cell(static_cast<int>(ri), static_cast<int>(qi));
      const double x = margin + ri * cell_size;
      const double y =
          margin + (result.q_grid.size() - 1 - qi) * cell_size;
      if (!cell.valid) {
        out << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\""
            << px(cell_size) << "\" height=\"" << px(cell_size)
            << "\" fill=\"#eeeeee\"/>\n";
        out << "<line x1=\"" << px(x) << "\" y1=\"" << px(y) << "\" x2=\""
            << px(x + cell_size) << "\" y2=\"" << px(y + cell_size)
            << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
        continue;
      }
      const double share =
          cell.trials > 0
              ? static_cast<double>(cell.svp_count) / cell.trials
              : 0.0;
      // White (0) to deep blue (1).
      const int red = static_cast<int>(std::lround(255.0 * (1.0 - share)));
      const int green =
          static_cast<int>(std::lround(255.0 - 160.0 * share));
      char color[16];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", red, green, 255);
      out << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\""
          << px(cell_size) << "\" height=\"" << px(cell_size) << "\" fill=\""
          << color << "\"/>\n";
    }
  }

  // Predicted-region boundary q = (1 - r)/2, drawn over the cell centers.
  const double r_lo = result.r_grid.front();
  const double r_hi = result.r_grid.back();
  const double q_lo = result.q_grid.front();
  const double q_hi = result.q_grid.back();
  const double plot_left = margin + 0.5 * cell_size;
  const double plot_right =
      margin + (result.r_grid.size() - 0.5) * cell_size;
  const double plot_bottom =
      margin + (result.q_grid.size() - 0.5) * cell_size;
  const double plot_top = margin + 0.5 * cell_size;
  const Range r_range{r_lo, r_hi > r_lo ? r_hi : r_lo + 1.0};
  const Range q_range{q_lo, q_hi > q_lo ? q_hi : q_lo + 1.0};
  out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" "
         "stroke-dasharray=\"6,3\" points=\"";
  bool first = true;
  const int boundary_samples = 128;
  for (int s = 0; s <= boundary_samples; ++s) {
    const double r = r_lo + (r_hi - r_lo) * s / boundary_samples;
    const double q = 0.5 * (1.0 - r);
    if (q < q_lo || q > q_hi) continue;
    if (!first) out << ' ';
    first = false;
    out << px(r_range.map(r, plot_left, plot_right)) << ','
        << px(q_range.map(q, plot_bottom, plot_top));
  }
  out << "\"/>\n";

  out << "<text x=\"" << px(width / 2 - 6) << "\" y=\"" << px(height - 16)
      << "\" font-family=\"sans-serif\" font-size=\"13\">r</text>\n";
  out << "<text x=\"16\" y=\"" << px(height / 2) <<
      "\" font-family=\"sans-serif\" font-size=\"13\">q</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace svplab
