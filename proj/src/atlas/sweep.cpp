#include "ortho3r/atlas.hpp"

#include "ortho3r/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace ortho3r::atlas {

namespace {

constexpr std::array<const char*, 5> kParamNames = {"d2", "d3", "d4", "r2", "r3"};

double* param_slot(DesignParams& p, const std::string& name) {
  if (name == "d2") return &p.d2;
  if (name == "d3") return &p.d3;
  if (name == "d4") return &p.d4;
  if (name == "r2") return &p.r2;
  if (name == "r3") return &p.r3;
  return nullptr;
}

// Whether the case needs this parameter strictly positive (d4 always does).
bool must_be_positive(FamilyCase c, const std::string& name) {
  const ZeroPattern z = zero_pattern(c);
  if (name == "d2") return z.d2;
  if (name == "r2") return z.r2;
  if (name == "d3") return z.d3;
  if (name == "r3") return z.r3;
  return true;
}

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InvalidInput(fmt::format("{}: '{}' is not a number", what, text));
  }
  return v;
}

// Palette indexed by group.
const char* group_colour(GroupLabel g) {
  static constexpr const char* kColours[] = {
      "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69",
      "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f", "#a6cee3", "#b2df8a",
      "#fb9a99", "#fdbf6f", "#cab2d6", "#e5c494", "#66c2a5", "#fc8d62", "#8da0cb"};
  return kColours[static_cast<int>(g)];
}

}  // namespace

SweepAxis parse_axis(const std::string& text) {
  const auto colon1 = text.find(':');
  const auto dots = text.find("..", colon1 == std::string::npos ? 0 : colon1);
  const auto colon2 = text.find(':', dots == std::string::npos ? 0 : dots);
  if (colon1 == std::string::npos || dots == std::string::npos || colon2 == std::string::npos) {
    throw InvalidInput(fmt::format("axis '{}' must look like PARAM:LO..HI:STEPS", text));
  }
  SweepAxis a;
  a.param = text.substr(0, colon1);
  DesignParams probe;
  if (param_slot(probe, a.param) == nullptr) throw InvalidInput(fmt::format("unknown parameter '{}'", a.param));
  a.lo = parse_number(text.substr(colon1 + 1, dots - colon1 - 1), "axis lower bound");
  a.hi = parse_number(text.substr(dots + 2, colon2 - dots - 2), "axis upper bound");
  const double steps = parse_number(text.substr(colon2 + 1), "axis steps");
  if (steps < 1 || steps != std::floor(steps) || steps > 100000) {
    throw InvalidInput(fmt::format("axis steps must be a positive integer, got '{}'", text.substr(colon2 + 1)));
  }
  a.steps = static_cast<int>(steps);
  if (!(a.hi > a.lo)) throw InvalidInput(fmt::format("axis '{}' needs LO < HI", text));
  if (a.lo < 0.0) throw InvalidInput(fmt::format("axis '{}' reaches negative lengths", text));
  return a;
}

DesignParams sweep_design(const SweepSpec& spec, double x, double y) {
  DesignParams p;
  for (const auto& [name, value] : spec.fixed) *param_slot(p, name) = value;
  *param_slot(p, spec.x.param) = x;
  *param_slot(p, spec.y.param) = y;
  return p;
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.x.param == spec.y.param) throw InvalidInput("x and y must sweep different parameters");
  if (spec.x.steps < 1 || spec.y.steps < 1) throw InvalidInput("sweep axes need at least one step");
  DesignParams probe;
  for (const auto& [name, value] : spec.fixed) {
    if (param_slot(probe, name) == nullptr) throw InvalidInput(fmt::format("unknown fixed parameter '{}'", name));
    if (name == spec.x.param || name == spec.y.param) {
      throw InvalidInput(fmt::format("'{}' is both swept and fixed", name));
    }
    if (!std::isfinite(value) || value < 0.0) throw InvalidInput(fmt::format("fixed {} must be >= 0", name));
  }
  for (const char* raw : kParamNames) {
    const std::string name = raw;
    const bool positive = must_be_positive(spec.family, name);
    for (const SweepAxis* axis : {&spec.x, &spec.y}) {
      if (axis->param != name) continue;
      if (!positive) {
        throw InvalidInput(fmt::format("case {} requires {} = 0, it cannot be swept", family_letter(spec.family), name));
      }
      if (axis->value(0) <= 0.0) throw InvalidInput(fmt::format("{} must stay positive across the sweep", name));
    }
    if (name == spec.x.param || name == spec.y.param) continue;
    const auto it = spec.fixed.find(name);
    const double value = it == spec.fixed.end() ? 0.0 : it->second;
    if (positive && !(value > 0.0)) {
      throw InvalidInput(fmt::format("case {} requires {} > 0; pass --fixed {}=VALUE", family_letter(spec.family), name, name));
    }
    if (!positive && value != 0.0) {
      throw InvalidInput(fmt::format("case {} requires {} = 0", family_letter(spec.family), name));
    }
  }
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  SweepResult r;
  r.spec = spec;
  for (int ix = 0; ix < spec.x.steps; ++ix) {
    for (int iy = 0; iy < spec.y.steps; ++iy) {
      SweepCell cell;
      cell.x = spec.x.value(ix);
      cell.y = spec.y.value(iy);
      const DesignParams p = sweep_design(spec, cell.x, cell.y);
      AnalysisOptions o;
      o.grid = spec.grid;
      o.trace = spec.trace;
      o.aspect = spec.aspect;
      const Analysis a = analyze(p, o);
      cell.node_count = a.metrics.node_count;
      cell.void_count = a.metrics.void_count;
      try {
        const Verdict v = numeric_verdict(p, a);
        cell.label = std::string(group_name(v.numeric));
        cell.indeterminate = !v.analytic.label.has_value();
      } catch (const NoSignatureMatch&) {
        cell.label = "?";
        cell.indeterminate = !analytic_group(p).label.has_value();
      }
      r.cells.push_back(cell);
    }
  }
  return r;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "x,y,label,node_count,void_count\n";
  for (const SweepCell& c : r.cells) {
    out += fmt::format("{:.9g},{:.9g},{},{},{}\n", c.x, c.y, c.label, c.node_count, c.void_count);
  }
  return out;
}

std::string zone_map_svg(const SweepResult& r) {
  const SweepSpec& s = r.spec;
  const double size = 600.0;
  const double margin = 60.0;
  const double cw = size / s.x.steps;
  const double ch = size / s.y.steps;
  auto sx = [&](double x) { return margin + (x - s.x.lo) / (s.x.hi - s.x.lo) * size; };
  auto sy = [&](double y) { return margin + size - (y - s.y.lo) / (s.y.hi - s.y.lo) * size; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:.0f}\" height=\"{0:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {0:.0f}\">\n",
      size + 2 * margin + 120.0);
  out += "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#000000\" "
         "stroke-width=\"1\"/></pattern></defs>\n";
  out += fmt::format("<title>case {} zone map</title>\n", family_letter(s.family));

  out += "<g id=\"cells\" shape-rendering=\"crispEdges\">\n";
  std::vector<GroupLabel> seen;
  for (std::size_t k = 0; k < r.cells.size(); ++k) {
    const SweepCell& c = r.cells[k];
    const int ix = static_cast<int>(k) / s.y.steps;
    const int iy = static_cast<int>(k) % s.y.steps;
    const double x = margin + ix * cw;
    const double y = margin + size - (iy + 1) * ch;
    const auto g = parse_group(c.label);
    const char* fill = g ? group_colour(*g) : "#ffffff";
    if (g && std::find(seen.begin(), seen.end(), *g) == seen.end()) seen.push_back(*g);
    out += fmt::format(
        "<rect x=\"{:.6g}\" y=\"{:.6g}\" width=\"{:.6g}\" height=\"{:.6g}\" fill=\"{}\" data-label=\"{}\"/>\n", x, y,
        cw, ch, fill, c.label);
    if (c.indeterminate) {
      out += fmt::format(
          "<rect class=\"indeterminate\" x=\"{:.6g}\" y=\"{:.6g}\" width=\"{:.6g}\" height=\"{:.6g}\" "
          "fill=\"url(#hatch)\"/>\n",
          x, y, cw, ch);
    }
  }
  out += "</g>\n";

  // Analytic zone boundaries traced on a fine sub-grid of the plane.
  const int fine = 300;
  auto analytic_at = [&](int i, int j) -> int {
    const double x = s.x.lo + (i + 0.5) * (s.x.hi - s.x.lo) / fine;
    const double y = s.y.lo + (j + 0.5) * (s.y.hi - s.y.lo) / fine;
    try {
      const AnalyticResult a = analytic_group(sweep_design(s, x, y));
      return a.label ? static_cast<int>(*a.label) : -1;
    } catch (const Error&) {
      return -2;
    }
  };
  std::vector<int> zone(static_cast<std::size_t>(fine) * fine);
  for (int i = 0; i < fine; ++i) {
    for (int j = 0; j < fine; ++j) zone[static_cast<std::size_t>(i) * fine + j] = analytic_at(i, j);
  }
  const double fx = size / fine;
  const double fy = size / fine;
  out += "<path id=\"transition-curves\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" d=\"";
  for (int i = 0; i < fine; ++i) {
    for (int j = 0; j < fine; ++j) {
      const int here = zone[static_cast<std::size_t>(i) * fine + j];
      if (i + 1 < fine && zone[static_cast<std::size_t>(i + 1) * fine + j] != here) {
        const double x = margin + (i + 1) * fx;
        out += fmt::format("M{:.5g} {:.5g}V{:.5g}", x, margin + size - (j + 1) * fy, margin + size - j * fy);
      }
      if (j + 1 < fine && zone[static_cast<std::size_t>(i) * fine + j + 1] != here) {
        const double y = margin + size - (j + 1) * fy;
        out += fmt::format("M{:.5g} {:.5g}H{:.5g}", margin + i * fx, y, margin + (i + 1) * fx);
      }
    }
  }
  out += "\"/>\n";

  out += "<g id=\"axes\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#000000\">\n";
  out += fmt::format("<rect x=\"{0}\" y=\"{0}\" width=\"{1}\" height=\"{1}\" fill=\"none\" stroke=\"#000000\"/>\n",
                     margin, size);
  out += fmt::format("<text x=\"{:.6g}\" y=\"{:.6g}\" text-anchor=\"middle\">{}</text>\n", margin + 0.5 * size,
                     margin + size + 40.0, s.x.param);
  out += fmt::format("<text x=\"{:.6g}\" y=\"{:.6g}\" text-anchor=\"middle\">{}</text>\n", margin - 40.0,
                     margin + 0.5 * size, s.y.param);
  for (int k = 0; k <= 4; ++k) {
    const double xv = s.x.lo + k * (s.x.hi - s.x.lo) / 4.0;
    const double yv = s.y.lo + k * (s.y.hi - s.y.lo) / 4.0;
    out += fmt::format("<text x=\"{:.6g}\" y=\"{:.6g}\" text-anchor=\"middle\">{:.3g}</text>\n", sx(xv),
                       margin + size + 18.0, xv);
    out += fmt::format("<text x=\"{:.6g}\" y=\"{:.6g}\" text-anchor=\"end\">{:.3g}</text>\n", margin - 6.0,
                       sy(yv) + 5.0, yv);
  }
  out += "</g>\n";

  std::sort(seen.begin(), seen.end());
  out += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"14\">\n";
  for (std::size_t k = 0; k < seen.size(); ++k) {
    const double y = margin + 24.0 * k;
    out += fmt::format("<rect x=\"{:.6g}\" y=\"{:.6g}\" width=\"16\" height=\"16\" fill=\"{}\" stroke=\"#000000\"/>\n",
                       margin + size + 20.0, y, group_colour(seen[k]));
    out += fmt::format("<text x=\"{:.6g}\" y=\"{:.6g}\">{}</text>\n", margin + size + 44.0, y + 13.0,
                       group_name(seen[k]));
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace ortho3r::atlas
