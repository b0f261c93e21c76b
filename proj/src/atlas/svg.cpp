#include "ortho3r/atlas.hpp"

#include <fmt/format.h>

#include <cmath>
#include <string>

namespace ortho3r::atlas {

namespace {

const char* shade(int count) {
  if (count >= 3) return "#404040";
  if (count >= 1) return "#C0C0C0";
  return nullptr;
}

}  // namespace

std::string cross_section_svg(const Analysis& a) {
  const GridSpec& g = a.grid;
  const int rows = g.n;          // rho cells, drawn left to right
  const int cols = 2 * g.n;      // z cells, drawn top (z = +rmax) to bottom
  const double cell = g.cell();
  const double margin = 0.08 * g.n;
  const double font = 0.04 * g.n;
  auto px = [&](double rho) { return rho / cell; };
  auto py = [&](double z) { return (g.rmax - z) / cell; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"{:.6g} {:.6g} {:.6g} {:.6g}\">\n",
      2.0 * (rows + 2 * margin), 2.0 * (cols + 2 * margin), -margin, -margin, rows + 2 * margin,
      cols + 2 * margin);
  out += fmt::format("<title>half cross-section d2={:.9g} d3={:.9g} d4={:.9g} r2={:.9g} r3={:.9g}</title>\n",
                     a.params.d2, a.params.d3, a.params.d4, a.params.r2, a.params.r3);
  out += fmt::format("<rect x=\"{:.6g}\" y=\"{:.6g}\" width=\"{:.6g}\" height=\"{:.6g}\" fill=\"#FFFFFF\"/>\n",
                     -margin, -margin, rows + 2 * margin, cols + 2 * margin);

  // Cells: run-length rects along rho for each z row.
  out += "<g id=\"cells\" shape-rendering=\"crispEdges\">\n";
  for (int j = cols - 1; j >= 0; --j) {
    const int y = cols - 1 - j;
    int i = 0;
    while (i < rows) {
      const char* fill = shade(a.field.at(i, j));
      int run = 1;
      while (i + run < rows && shade(a.field.at(i + run, j)) == fill) ++run;
      if (fill != nullptr) {
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"1\" fill=\"{}\"/>\n", i, y, run, fill);
      }
      i += run;
    }
  }
  out += "</g>\n";

  out += "<g id=\"singular-curves\" fill=\"none\" stroke=\"#1f4fd8\" stroke-width=\"1\">\n";
  for (const SectionCurve& c : a.section_curves) {
    out += fmt::format("<polyline data-branch=\"{}\" points=\"", c.branch_id);
    for (std::size_t k = 0; k < c.vertices.size(); ++k) {
      if (k > 0) out += ' ';
      out += fmt::format("{:.6g},{:.6g}", px(c.vertices[k].rho), py(c.vertices[k].z));
    }
    if (c.closed && !c.vertices.empty()) {
      out += fmt::format(" {:.6g},{:.6g}", px(c.vertices.front().rho), py(c.vertices.front().z));
    }
    out += "\"/>\n";
  }
  out += "</g>\n";

  const double r = 0.012 * g.n;
  out += "<g id=\"nodes\" fill=\"#d81f1f\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
  for (const NodePoint& n : a.nodes.nodes) {
    out += fmt::format("<circle class=\"node\" cx=\"{:.6g}\" cy=\"{:.6g}\" r=\"{:.6g}\"/>\n", px(n.location.rho),
                       py(n.location.z), r);
  }
  out += "</g>\n";
  out += "<g id=\"cusps\" fill=\"#1fa84f\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
  for (const CuspPoint& c : a.cusps.cusps) {
    const double x = px(c.location.rho);
    const double y = py(c.location.z);
    out += fmt::format("<path class=\"cusp\" d=\"M {:.6g} {:.6g} L {:.6g} {:.6g} L {:.6g} {:.6g} L {:.6g} {:.6g} Z\"/>\n",
                       x, y - 1.5 * r, x + 1.5 * r, y, x, y + 1.5 * r, x - 1.5 * r, y);
  }
  out += "</g>\n";

  // Axes: the z axis at rho = 0 and the rho axis at z = 0.
  out += "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"0.75\">\n";
  out += fmt::format("<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"{}\"/>\n", cols);
  out += fmt::format("<line x1=\"0\" y1=\"{:.6g}\" x2=\"{}\" y2=\"{:.6g}\"/>\n", py(0.0), rows, py(0.0));
  out += "</g>\n";
  out += fmt::format(
      "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"{:.6g}\" fill=\"#000000\">\n"
      "<text x=\"{:.6g}\" y=\"{:.6g}\" text-anchor=\"end\">&#961;</text>\n"
      "<text x=\"{:.6g}\" y=\"{:.6g}\" text-anchor=\"middle\">z</text>\n"
      "<text x=\"{:.6g}\" y=\"{:.6g}\" text-anchor=\"end\">{:.4g}</text>\n"
      "</g>\n",
      font, static_cast<double>(rows), py(0.0) - 0.3 * font, 0.0, -0.3 * font, static_cast<double>(rows),
      static_cast<double>(cols) + font, g.rmax);
  out += "</svg>\n";
  return out;
}

}  // namespace ortho3r::atlas
