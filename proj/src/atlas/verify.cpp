#include "ortho3r/atlas.hpp"

#include <fmt/format.h>

#include <chrono>
#include <string>

namespace ortho3r::atlas {

const std::vector<Example>& reference_examples() {
  // (d2, d3, d4, r2, r3) as printed in the figure captions.
  static const std::vector<Example> kExamples = {
      {GroupLabel::A1, {0, 2, 1.5, 1, 0}, 0, 0},     {GroupLabel::A2, {0, 2, 2.2, 1.5, 0}, 2, 0},
      {GroupLabel::A3, {0, 2, 3, 1, 0}, 4, 0},       {GroupLabel::B1, {0, 2, 1, 0, 0}, 0, 0},
      {GroupLabel::B2, {0, 2, 3, 0, 0}, 1, 0},       {GroupLabel::C, {0, 0, 2, 1.5, 0}, 0, 0},
      {GroupLabel::D1, {1, 1.4, 0.7, 0, 0}, 2, 1},   {GroupLabel::D2, {1, 2, 1.5, 0, 0}, 0, 0},
      {GroupLabel::D3, {1, 2, 2.5, 0, 0}, 1, 0},     {GroupLabel::D4, {1, 0.5, 2, 0, 0}, 2, 0},
      {GroupLabel::D5, {1, 0.6, 0.7, 0, 0}, 0, 0},   {GroupLabel::E, {1, 0, 1.5, 0, 0}, 0, 0},
      {GroupLabel::F1, {0, 2, 1.5, 1, 1}, 0, 0},     {GroupLabel::F2, {0, 1, 2, 1, 1}, 2, 0},
      {GroupLabel::G, {0, 1, 3, 0, 1}, 0, 0},        {GroupLabel::H, {0, 0, 1, 3, 1}, 0, 0},
      {GroupLabel::I1, {1, 2.5, 1.5, 0, 0.5}, 0, 0}, {GroupLabel::I2, {1, 3, 0.7, 0, 0.5}, 2, 1},
      {GroupLabel::I3, {1, 0.5, 0.7, 0, 0.5}, 0, 1}, {GroupLabel::I4, {1, 0.3, 2, 0, 0.5}, 2, 1},
      {GroupLabel::J, {1, 0, 2, 0, 1}, 0, 1},
  };
  return kExamples;
}

std::vector<VerifyRow> run_verify(int grid, const std::string& only) {
  std::vector<VerifyRow> rows;
  for (const Example& ex : reference_examples()) {
    if (!only.empty() && group_name(ex.group).substr(0, 1) != only.substr(0, 1)) continue;
    VerifyRow row;
    row.example = ex;
    const auto t0 = std::chrono::steady_clock::now();
    AnalysisOptions o;
    o.grid = grid;
    const Analysis a = analyze(ex.params, o);
    row.nodes = a.metrics.node_count;
    row.voids = a.metrics.void_count;
    try {
      const Verdict v = numeric_verdict(ex.params, a);
      row.label = v.numeric;
      if (!v.warnings.empty()) row.note = v.warnings.front();
    } catch (const NoSignatureMatch& e) {
      row.note = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.pass = row.label == ex.group && row.nodes == ex.nodes && row.voids == ex.voids;
    rows.push_back(row);
  }
  return rows;
}

std::string group_table() {
  std::string out = fmt::format("{:<6} {:>4} {:>5}  {:<18} {:<13} {:<18} {}\n", "group", "void", "nodes",
                                "4-IKS zone", "holes", "feasible paths", "class");
  for (GroupLabel g : kAllGroups) {
    const GroupRecord& r = group_record(g);
    out += fmt::format("{:<6} {:>4} {:>5}  {:<18} {:<13} {:<18} {}\n", group_name(g), r.voids, r.nodes,
                       size_name(r.quaternary), size_name(r.holes), size_name(r.feasible), class_rank(g));
  }
  return out;
}

}  // namespace ortho3r::atlas
