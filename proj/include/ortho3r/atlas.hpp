#pragma once

#include "ortho3r/classify.hpp"
#include "ortho3r/workspace.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ortho3r::atlas {

std::string version();

// Rounds to 9 significant digits so reports are stable text.
double round9(double v);

nlohmann::json report_json(const Analysis& analysis, const Verdict& verdict);

// Half cross-section: 4-IKS cells dark, 2-IKS light, one polyline per section
// curve, circles for nodes, diamonds for cusps. User units are grid cells.
std::string cross_section_svg(const Analysis& analysis);

struct SweepAxis {
  std::string param;  // d2, d3, d4, r2 or r3
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;

  // Cell-centred sample k of steps.
  double value(int k) const { return lo + (k + 0.5) * (hi - lo) / steps; }
};

// "d3:0..3:20". Throws InvalidInput.
SweepAxis parse_axis(const std::string& text);

struct SweepSpec {
  FamilyCase family = FamilyCase::A;
  SweepAxis x;
  SweepAxis y;
  std::map<std::string, double> fixed;
  int grid = 256;
  int trace = 512;
  int aspect = 128;
};

struct SweepCell {
  double x = 0.0;
  double y = 0.0;
  std::string label;  // group name, "?" when no row matches
  int node_count = 0;
  int void_count = 0;
  bool indeterminate = false;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;  // x-major, steps_x * steps_y entries
};

// Design at a sweep point. Throws InvalidInput when the zero pattern of the
// case is violated.
DesignParams sweep_design(const SweepSpec& spec, double x, double y);
void validate_sweep(const SweepSpec& spec);
SweepResult run_sweep(const SweepSpec& spec);
std::string sweep_csv(const SweepResult& r);
std::string zone_map_svg(const SweepResult& r);

struct Example {
  GroupLabel group;
  DesignParams params;
  int nodes;
  int voids;
};

// The 21 reference designs, one per group.
const std::vector<Example>& reference_examples();

struct VerifyRow {
  Example example;
  std::optional<GroupLabel> label;
  int nodes = -1;
  int voids = -1;
  bool pass = false;
  std::string note;
  double seconds = 0.0;
};

// only: family letter filter ("A") or empty for all.
std::vector<VerifyRow> run_verify(int grid, const std::string& only);

// Property table, one line per group.
std::string group_table();

}  // namespace ortho3r::atlas
