#include "banach/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "banach/error.hpp"

namespace banach {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Screen y grows downwards; grid row 0 is drawn at the bottom.
double screen_y(const RasterDomain& g, int row) { return g.ny() - row; }

std::string mask_path(const RasterDomain& g) {
  std::ostringstream d;
  for (int j = 0; j < g.ny(); ++j) {
    int i = 0;
    while (i < g.nx()) {
      if (!g.test(i, j)) {
        ++i;
        continue;
      }
      const int start = i;
      while (i < g.nx() && g.test(i, j)) ++i;
      d << 'M' << start << ' ' << num(screen_y(g, j) - 1) << 'h' << (i - start) << "v1h" << -(i - start) << 'z';
    }
  }
  return d.str();
}

std::string cycle_points(const RasterDomain& g, const Cycle& c) {
  std::ostringstream p;
  for (std::size_t k = 0; k < c.cells.size(); ++k) {
    if (k) p << ' ';
    p << num(g.col(c.cells[k]) + 0.5) << ',' << num(screen_y(g, g.row(c.cells[k])) - 0.5);
  }
  return p.str();
}

}  // namespace

std::string render_svg(const SvgScene& scene) {
  const RasterDomain& g = scene.k;
  if (scene.zero_set && !scene.zero_set->same_grid(g))
    fail(ErrorKind::InvalidArgument, "zero set and K must share a grid");
  const double scale = std::clamp(800.0 / std::max(g.nx(), g.ny()), 1.0, 16.0);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(g.nx() * scale) << "\" height=\""
      << num(g.ny() * scale) << "\" viewBox=\"0 0 " << g.nx() << ' ' << g.ny() << "\">\n";
  out << "<rect width=\"" << g.nx() << "\" height=\"" << g.ny() << "\" fill=\"#ffffff\"/>\n";
  out << "<path id=\"K\" fill=\"#c9d6e8\" d=\"" << mask_path(g) << "\"/>\n";
  if (scene.zero_set) out << "<path id=\"Z\" fill=\"#2b5d9c\" d=\"" << mask_path(*scene.zero_set) << "\"/>\n";
  if (scene.highlight) out << "<path id=\"U\" fill=\"#e07a2f\" fill-opacity=\"0.7\" d=\"" << mask_path(*scene.highlight) << "\"/>\n";
  if (scene.holes) {
    for (std::size_t i = 0; i < scene.holes->holes.size(); ++i) {
      const Hole& h = scene.holes->holes[i];
      if (h.boundary.cells.empty()) continue;
      out << "<polygon class=\"hole\" data-hole=\"" << i << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\""
          << num(std::max(0.15, 1.5 / scale)) << "\" points=\"" << cycle_points(g, h.boundary) << "\"/>\n";
    }
    for (const auto& w : scene.windings) {
      if (w.hole >= scene.holes->holes.size()) continue;
      const std::size_t c = w.anchor_cell;
      out << "<text x=\"" << num(g.col(c) + 0.5) << "\" y=\"" << num(screen_y(g, g.row(c)) - 0.5)
          << "\" font-size=\"" << num(std::max(1.0, 14.0 / scale)) << "\" fill=\"#c0392b\">w=" << w.contour_winding
          << " q=" << w.charge << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace banach
