#include "ortho3r/atlas.hpp"

#include <fmt/format.h>

#include <cmath>
#include <string>

namespace ortho3r::atlas {

std::string version() { return ORTHO3R_VERSION; }

double round9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  return std::stod(fmt::format("{:.9g}", v));
}

namespace {

nlohmann::json joint_json(const JointSample& s) {
  return {{"theta2", round9(s.theta2)}, {"theta3", round9(s.theta3)}};
}

nlohmann::json params_json(const DesignParams& p) {
  return {{"d2", round9(p.d2)}, {"d3", round9(p.d3)}, {"d4", round9(p.d4)}, {"r2", round9(p.r2)}, {"r3", round9(p.r3)}};
}

}  // namespace

nlohmann::json report_json(const Analysis& a, const Verdict& v) {
  nlohmann::json j;
  j["tool_version"] = version();
  j["params"] = params_json(a.params);
  j["family_case"] = std::string(1, family_letter(family_case(a.params)));
  j["group"] = std::string(group_name(v.numeric));
  j["class_rank"] = class_rank(v.numeric);

  nlohmann::json verdict;
  verdict["analytic_label"] = v.analytic.label ? std::string(group_name(*v.analytic.label)) : "Indeterminate";
  verdict["numeric_label"] = std::string(group_name(v.numeric));
  verdict["agreement"] = v.agreement;
  verdict["provisional_rule"] = v.analytic.provisional;
  verdict["warnings"] = v.warnings;
  j["verdict"] = verdict;

  const WorkspaceMetrics& m = a.metrics;
  j["metrics"] = {{"node_count", m.node_count},
                  {"cusp_count", m.cusp_count},
                  {"void_count", m.void_count},
                  {"quaternary_ratio", round9(m.quaternary_ratio)},
                  {"hole_ratio", round9(m.hole_ratio)},
                  {"feasible_ratio", round9(m.feasible_ratio)}};

  nlohmann::json nodes = nlohmann::json::array();
  for (const NodePoint& n : a.nodes.nodes) {
    nodes.push_back({{"rho", round9(n.location.rho)},
                     {"z", round9(n.location.z)},
                     {"preimage_a", joint_json(n.preimage_a)},
                     {"preimage_b", joint_json(n.preimage_b)},
                     {"residual", round9(n.residual)},
                     {"refined", n.refined}});
  }
  j["nodes"] = nodes;
  nlohmann::json cusps = nlohmann::json::array();
  for (const CuspPoint& c : a.cusps.cusps) {
    cusps.push_back({{"rho", round9(c.location.rho)},
                     {"z", round9(c.location.z)},
                     {"preimage", joint_json(c.preimage)},
                     {"multiplicity", c.multiplicity}});
  }
  j["cusps"] = cusps;
  j["cusp_candidates"] = a.cusps.candidates;

  nlohmann::json voids = nlohmann::json::array();
  for (const Void& vd : a.cavities.voids) {
    voids.push_back({{"area", round9(vd.area)},
                     {"rho", round9(vd.representative.rho)},
                     {"z", round9(vd.representative.z)}});
  }
  j["voids"] = voids;

  nlohmann::json aspects;
  aspects["count"] = a.aspects.count;
  nlohmann::json fractions = nlohmann::json::array();
  nlohmann::json coverage = nlohmann::json::array();
  for (double f : a.aspects.joint_fraction) fractions.push_back(round9(f));
  for (double c : a.aspects.coverage) coverage.push_back(round9(c));
  aspects["joint_fraction"] = fractions;
  aspects["coverage"] = coverage;
  j["aspects"] = aspects;

  j["grid"] = {{"rmax", round9(a.grid.rmax)},
               {"n", a.grid.n},
               {"trace", a.options.trace},
               {"aspect", a.options.aspect}};
  return j;
}

}  // namespace ortho3r::atlas
