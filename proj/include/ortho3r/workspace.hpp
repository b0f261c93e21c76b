#pragma once

#include "ortho3r/model.hpp"
#include "ortho3r/singular.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ortho3r {

// Raster of the half cross-section: rho in [0, rmax] with n cells, z in
// [-rmax, rmax] with 2n cells.
struct GridSpec {
  double rmax = 0.0;
  int n = 512;

  // rmax = 1.02 * (d2 + d3 + d4 + r2 + r3): the bound is attained exactly by
  // some designs, so a small margin keeps the outer ring clear.
  static GridSpec defaults(const DesignParams& p, int n = 512);

  double cell() const { return rmax / n; }
  double rho_at(int i) const { return (i + 0.5) * cell(); }
  double z_at(int j) const { return -rmax + (j + 0.5) * cell(); }
  // Throws InvalidInput for n < 64 or rmax <= 0.
  void validate() const;
};

struct IksField {
  GridSpec grid;
  std::vector<std::uint8_t> counts;  // index i * (2n) + j

  int rows() const { return grid.n; }        // rho direction
  int cols() const { return 2 * grid.n; }    // z direction
  int at(int i, int j) const { return counts[static_cast<std::size_t>(i) * cols() + j]; }
};

struct Void {
  std::size_t cells = 0;
  double area = 0.0;
  SectionPoint representative;
};

struct Cavities {
  std::vector<Void> voids;
  std::vector<SectionPoint> hole_profile;  // (rho_min(z), z) per reachable row
  double hole_ratio = 0.0;
};

struct AspectSummary {
  int m = 0;
  std::size_t count = 0;
  std::vector<double> joint_fraction;
  std::vector<double> coverage;
  double singular_band_fraction = 0.0;
  double feasible_ratio = 0.0;
};

struct WorkspaceMetrics {
  int node_count = 0;
  int cusp_count = 0;
  int void_count = 0;
  double quaternary_ratio = 0.0;
  double hole_ratio = 0.0;
  double feasible_ratio = 0.0;
};

struct AnalysisOptions {
  int grid = 512;
  int trace = 1024;
  int aspect = 256;
};

// Everything the classifier and the figures need, from one pass.
struct Analysis {
  DesignParams params;
  AnalysisOptions options;
  GridSpec grid;
  std::vector<JointCurve> joint_curves;
  std::vector<SectionCurve> section_curves;
  NodeSearch nodes;
  CuspSearch cusps;
  IksField field;
  std::vector<std::uint8_t> band;  // cells near a section curve, same layout as field
  Cavities cavities;
  AspectSummary aspects;
  WorkspaceMetrics metrics;
  std::vector<std::string> warnings;
};

// Throws GridTooSmall if the top row, bottom row or rho = rmax column holds a
// reachable cell.
IksField iks_field(const DesignParams& p, const GridSpec& g);

// Interior count-0 components are voids. Components touching any grid edge,
// the axis edge included, are exterior. excluded marks cells (band) that may
// not form a void on their own; pass nullptr to count every component.
Cavities cavities(const IksField& field, const std::vector<std::uint8_t>* excluded = nullptr);

// Cells whose centre lies within half a cell diagonal of a section curve.
std::vector<std::uint8_t> singular_band(const GridSpec& g, const std::vector<SectionCurve>& curves);

// Fraction of 4-IKS cells among reachable cells, band cells excluded.
double quaternary_ratio(const IksField& field, const std::vector<std::uint8_t>& band);

// Aspects on an m x m torus. Coverage of each aspect is measured on g by
// solving the inverse kinematics at every reachable non-band cell.
AspectSummary aspects(const DesignParams& p, int m, const GridSpec& g);
AspectSummary aspects(const DesignParams& p, int m);

WorkspaceMetrics metrics(const DesignParams& p, const GridSpec& g);

Analysis analyze(const DesignParams& p, const AnalysisOptions& options = {});
// Same on an explicit raster; options.grid is ignored.
Analysis analyze(const DesignParams& p, const GridSpec& g, const AnalysisOptions& options = {});

}  // namespace ortho3r
